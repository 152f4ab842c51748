#pragma once

#include <cmath>

namespace qwsearch {

// Compensated (Kahan-Babuska-Neumaier) accumulator. Unlike plain Kahan
// summation this variant also tracks the error when an incoming term is
// larger than the running sum, which happens in the lattice sums where the
// small-k terms are O(n^2) while the tail terms are O(1).
template <typename T = double>
struct KahanAccumulator {
  T sum{};
  T compensation{};

  void add(T value) {
    T t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  KahanAccumulator& operator+=(T value) {
    add(value);
    return *this;
  }

  T value() const { return sum + compensation; }
};

template <typename Iterator>
double kahan_sum(Iterator first, Iterator last) {
  KahanAccumulator<double> acc;
  for (; first != last; ++first) acc.add(*first);
  return acc.value();
}

}  // namespace qwsearch
