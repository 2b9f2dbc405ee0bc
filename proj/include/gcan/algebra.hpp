#pragma once

// Signatures, basis blades and the Cayley table of a real Clifford algebra
// G_{p,q,r} with a diagonal metric.
//
// Canonical basis-vector and blade order (everything else derives from it):
//   * Basis vectors occupy positions 0..n-1.  The r null vectors come first,
//     then the p positive ones, then the q negative ones.
//   * Labels: when r > 0 vectors are labelled e0..e{n-1} (so G_{3,0,1} has
//     e0 null and e1,e2,e3 positive); when r == 0 they are labelled e1..en.
//   * Blades are bitmasks over positions, ordered grade-major and then
//     lexicographically by their sorted index list.  G_{3,0,0} therefore
//     reads 1, e1, e2, e3, e12, e13, e23, e123 and G_{3,0,1} reads
//     1, e0, e1, e2, e3, e01, e02, e03, e12, e13, e23, e012, e013, e023,
//     e123, e0123.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcan/error.hpp"

namespace gcan {

/// Upper bound on n = p + q + r; keeps the 2^n x 2^n table small.
inline constexpr int kMaxDimension = 8;

using BladeBits = std::uint32_t;

class Signature {
 public:
  Signature() = default;

  Signature(int p, int q, int r) : p_(p), q_(q), r_(r) {
    if (p < 0 || q < 0 || r < 0) {
      throw Error(ErrorCode::bad_signature, "negative count in (" + describe() + ")");
    }
    if (p + q + r > kMaxDimension) {
      throw Error(ErrorCode::dimension_cap,
                  "n = " + std::to_string(p + q + r) + " exceeds cap " + std::to_string(kMaxDimension));
    }
    metric_.reserve(static_cast<std::size_t>(n()));
    metric_.insert(metric_.end(), static_cast<std::size_t>(r), 0);
    metric_.insert(metric_.end(), static_cast<std::size_t>(p), 1);
    metric_.insert(metric_.end(), static_cast<std::size_t>(q), -1);
  }

  /// Parses "p,q,r" (whitespace tolerated).
  static Signature parse(std::string_view text) {
    std::vector<int> parts;
    std::string token;
    auto flush = [&]() {
      if (token.empty()) throw Error(ErrorCode::bad_signature, "expected \"p,q,r\", got \"" + std::string(text) + "\"");
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw Error(ErrorCode::bad_signature, "bad integer \"" + token + "\"");
      parts.push_back(v);
      token.clear();
    };
    for (char ch : text) {
      if (ch == ' ' || ch == '\t') continue;
      if (ch == ',') {
        flush();
      } else {
        token.push_back(ch);
      }
    }
    flush();
    if (parts.size() != 3) throw Error(ErrorCode::bad_signature, "expected three counts in \"" + std::string(text) + "\"");
    return Signature(parts[0], parts[1], parts[2]);
  }

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  int r() const noexcept { return r_; }
  int n() const noexcept { return p_ + q_ + r_; }

  /// e_i^2 for basis-vector position i.
  int metric(int i) const { return metric_.at(static_cast<std::size_t>(i)); }
  std::span<const int> metric() const noexcept { return metric_; }

  /// Label digit used in blade names for position i.
  int label(int i) const noexcept { return r_ > 0 ? i : i + 1; }

  std::string describe() const {
    return std::to_string(p_) + "," + std::to_string(q_) + "," + std::to_string(r_);
  }

  friend bool operator==(const Signature& a, const Signature& b) noexcept {
    return a.p_ == b.p_ && a.q_ == b.q_ && a.r_ == b.r_;
  }

 private:
  int p_ = 0;
  int q_ = 0;
  int r_ = 0;
  std::vector<int> metric_;
};

/// Sign from reordering the concatenation of two sorted index sets into
/// sorted order, ignoring any metric contraction.
inline int reorder_sign(BladeBits a, BladeBits b) noexcept {
  a >>= 1;
  int swaps = 0;
  while (a != 0) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

/// Signed blade-by-blade multiplication table.  entry(j, k) gives the blade
/// index and sign of e_j e_k; the equivalent 3-tensor view is
/// M[i][j][k] = sign if i == entry(j,k).index, else 0.
class CayleyTable {
 public:
  struct Entry {
    std::uint32_t index = 0;
    std::int8_t sign = 0;
  };

  CayleyTable() = default;
  CayleyTable(std::size_t dim, std::vector<Entry> entries) : dim_(dim), entries_(std::move(entries)) {}

  std::size_t dim() const noexcept { return dim_; }
  const Entry& entry(std::size_t j, std::size_t k) const noexcept { return entries_[j * dim_ + k]; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  int tensor(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    const Entry& e = entry(j, k);
    return e.index == i ? e.sign : 0;
  }

  /// Flips the sign of one entry; used only by fault-injection tests.
  void corrupt(std::size_t j, std::size_t k) noexcept {
    auto& e = entries_[j * dim_ + k];
    e.sign = static_cast<std::int8_t>(e.sign == 0 ? 1 : -e.sign);
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

/// Immutable description of G_{p,q,r}: blade order, names, grades and the
/// Cayley table.  Shared between multivectors through AlgebraPtr.
class Algebra {
 public:
  static AlgebraPtr make(const Signature& sig) { return AlgebraPtr(new Algebra(sig)); }
  static AlgebraPtr make(int p, int q, int r) { return make(Signature(p, q, r)); }
  static AlgebraPtr make(std::string_view text) { return make(Signature::parse(text)); }

  /// Same algebra with the sign of table entry (j, k) flipped.  Test hook for
  /// checking that the verification suites catch a corrupted table.
  static AlgebraPtr make_with_fault(const Signature& sig, std::size_t j, std::size_t k) {
    auto* alg = new Algebra(sig);
    alg->table_.corrupt(j, k);
    alg->faulty_ = true;
    return AlgebraPtr(alg);
  }

  const Signature& signature() const noexcept { return sig_; }
  int n() const noexcept { return sig_.n(); }
  std::size_t dim() const noexcept { return bits_.size(); }

  BladeBits bits(std::size_t blade) const { return bits_.at(blade); }
  std::size_t index_of(BladeBits bits) const { return index_of_bits_.at(bits); }
  int grade(std::size_t blade) const { return grade_.at(blade); }
  std::span<const int> grades() const noexcept { return grade_; }

  /// Blade indices of grade k, in canonical order.
  std::span<const std::size_t> grade_blades(int k) const {
    if (k < 0 || k > n()) throw Error(ErrorCode::grade_out_of_range, "grade " + std::to_string(k));
    const auto begin = static_cast<std::size_t>(grade_offset_[static_cast<std::size_t>(k)]);
    const auto end = static_cast<std::size_t>(grade_offset_[static_cast<std::size_t>(k) + 1]);
    return std::span<const std::size_t>(identity_).subspan(begin, end - begin);
  }

  std::size_t pseudoscalar() const noexcept { return dim() - 1; }

  /// (-1)^{k(k-1)/2} for the blade's grade k.
  int reverse_sign(std::size_t blade) const { return reverse_sign_.at(blade); }
  /// Sign of e_A e_A (0 when A contains a null vector).
  int square_sign(std::size_t blade) const { return table_.entry(blade, blade).sign; }
  /// True when the blade contains a null basis vector.
  bool is_degenerate(std::size_t blade) const {
    return (bits_.at(blade) & ((BladeBits{1} << sig_.r()) - 1)) != 0;
  }

  const CayleyTable& table() const noexcept { return table_; }
  bool faulty() const noexcept { return faulty_; }

  std::string blade_name(std::size_t blade) const {
    const BladeBits b = bits(blade);
    if (b == 0) return "1";
    std::string out = "e";
    for (int i = 0; i < n(); ++i) {
      if (b & (BladeBits{1} << i)) out += std::to_string(sig_.label(i));
    }
    return out;
  }

  /// Blade index and sign for an unordered list of basis labels, e.g. "21"
  /// -> (-1, e12).  Repeated labels contract through the metric.
  std::pair<int, std::size_t> blade_from_labels(std::string_view digits) const {
    int sign = 1;
    BladeBits acc = 0;
    for (char ch : digits) {
      if (ch < '0' || ch > '9') throw Error(ErrorCode::parse_error, "bad basis label '" + std::string(1, ch) + "'");
      const int label = ch - '0';
      const int pos = sig_.r() > 0 ? label : label - 1;
      if (pos < 0 || pos >= n()) {
        throw Error(ErrorCode::parse_error, "basis label " + std::to_string(label) + " not in G(" + sig_.describe() + ")");
      }
      const BladeBits ebit = BladeBits{1} << pos;
      sign *= reorder_sign(acc, ebit);
      if (acc & ebit) sign *= sig_.metric(pos);
      acc ^= ebit;
    }
    return {sign, index_of(acc)};
  }

 private:
  explicit Algebra(const Signature& sig) : sig_(sig) {
    const int n = sig.n();
    const std::size_t dim = std::size_t{1} << n;
    bits_.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) bits_[i] = static_cast<BladeBits>(i);
    auto indices = [](BladeBits b) {
      std::vector<int> out;
      for (int i = 0; b != 0; ++i, b >>= 1) {
        if (b & 1u) out.push_back(i);
      }
      return out;
    };
    std::stable_sort(bits_.begin(), bits_.end(), [&](BladeBits a, BladeBits b) {
      const int ga = std::popcount(a);
      const int gb = std::popcount(b);
      if (ga != gb) return ga < gb;
      return indices(a) < indices(b);
    });
    index_of_bits_.resize(dim);
    grade_.resize(dim);
    reverse_sign_.resize(dim);
    identity_.resize(dim);
    grade_offset_.assign(static_cast<std::size_t>(n) + 2, 0);
    for (std::size_t i = 0; i < dim; ++i) {
      index_of_bits_[bits_[i]] = i;
      const int k = std::popcount(bits_[i]);
      grade_[i] = k;
      reverse_sign_[i] = ((k * (k - 1) / 2) % 2 == 0) ? 1 : -1;
      identity_[i] = i;
      grade_offset_[static_cast<std::size_t>(k) + 1] += 1;
    }
    for (std::size_t k = 1; k < grade_offset_.size(); ++k) grade_offset_[k] += grade_offset_[k - 1];

    std::vector<CayleyTable::Entry> entries(dim * dim);
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < dim; ++k) {
        const BladeBits a = bits_[j];
        const BladeBits b = bits_[k];
        int sign = reorder_sign(a, b);
        const BladeBits common = a & b;
        for (int i = 0; i < n; ++i) {
          if (common & (BladeBits{1} << i)) sign *= sig.metric(i);
        }
        entries[j * dim + k] = {static_cast<std::uint32_t>(index_of_bits_[a ^ b]), static_cast<std::int8_t>(sign)};
      }
    }
    table_ = CayleyTable(dim, std::move(entries));
  }

  Signature sig_;
  std::vector<BladeBits> bits_;
  std::vector<std::size_t> index_of_bits_;
  std::vector<int> grade_;
  std::vector<int> reverse_sign_;
  std::vector<std::size_t> identity_;
  std::vector<int> grade_offset_;
  CayleyTable table_;
  bool faulty_ = false;
};

/// Convenience wrapper matching the free-function surface of the other
/// modules.
inline const CayleyTable& build_cayley_table(const Algebra& alg) { return alg.table(); }

/// Aligned text grid of the table: row j, column k holds e_j e_k.
inline std::string format_cayley_table(const Algebra& alg) {
  const std::size_t dim = alg.dim();
  std::vector<std::string> names(dim);
  std::size_t width = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    names[i] = alg.blade_name(i);
    width = std::max(width, names[i].size() + 2);
  }
  auto cell = [&](std::size_t j, std::size_t k) {
    const auto& e = alg.table().entry(j, k);
    if (e.sign == 0) return std::string("0");
    return (e.sign < 0 ? std::string("-") : std::string()) + names[e.index];
  };
  std::ostringstream os;
  auto pad = [&](const std::string& s) { os << std::string(width - s.size(), ' ') << s; };
  if (dim == 1) {
    os << "[[" << cell(0, 0) << "]]\n";
    return os.str();
  }
  pad("");
  os << " |";
  for (std::size_t k = 0; k < dim; ++k) pad(names[k]);
  os << '\n' << std::string(width + 2 + width * dim, '-') << '\n';
  for (std::size_t j = 0; j < dim; ++j) {
    pad(names[j]);
    os << " |";
    for (std::size_t k = 0; k < dim; ++k) pad(cell(j, k));
    os << '\n';
  }
  return os.str();
}

}  // namespace gcan
