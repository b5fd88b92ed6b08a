#include <bit>
#include <cmath>
#include <stdexcept>

#include "mlqmc/hash.hpp"
#include "mlqmc/lowdisc.hpp"

namespace mlqmc {

PointSet::PointSet(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), data_(count * dim, 0.0) {}

PointSet::PointSet(std::size_t count, std::size_t dim, std::vector<double> data)
    : count_(count), dim_(dim), data_(std::move(data)) {
  if (data_.size() != count * dim) throw std::invalid_argument("PointSet: size mismatch");
}

PointSet PointSet::prefix(std::size_t count) const {
  if (count > count_) throw std::out_of_range("PointSet::prefix beyond count");
  return PointSet(count, dim_,
                  std::vector<double>(data_.begin(), data_.begin() + count * dim_));
}

DigitalNetGenerator::DigitalNetGenerator(std::size_t dimension, unsigned bit_depth,
                                         const DirectionTable& table)
    : dimension_(dimension), bit_depth_(bit_depth) {
  if (dimension == 0) throw std::invalid_argument("DigitalNetGenerator: dimension must be >= 1");
  if (bit_depth == 0 || bit_depth > 64) {
    throw std::invalid_argument("DigitalNetGenerator: bit_depth must be in [1, 64]");
  }
  if (dimension > table.max_dimension()) {
    throw std::out_of_range("DigitalNetGenerator: dimension " + std::to_string(dimension) +
                            " exceeds direction table (" +
                            std::to_string(table.max_dimension()) + ")");
  }
  const unsigned B = bit_depth;
  v_.assign(dimension * B, 0);
  for (unsigned k = 0; k < B; ++k) v_[k] = std::uint64_t{1} << (B - 1 - k);
  for (std::size_t j = 1; j < dimension; ++j) {
    const DirectionEntry& e = table.entry(j + 1);
    std::uint64_t* v = v_.data() + j * B;
    const unsigned s = e.s;
    for (unsigned k = 0; k < B && k < s; ++k) v[k] = e.m[k] << (B - 1 - k);
    for (unsigned k = s; k < B; ++k) {
      std::uint64_t x = v[k - s] ^ (v[k - s] >> s);
      for (unsigned i = 1; i < s; ++i) {
        if ((e.a >> (s - 1 - i)) & 1u) x ^= v[k - i];
      }
      v[k] = x;
    }
  }
}

DigitalNetGenerator::DigitalNetGenerator(std::size_t dimension, unsigned bit_depth)
    : DigitalNetGenerator(dimension, bit_depth, DirectionTable::bundled()) {}

void DigitalNetGenerator::check_count(std::uint64_t count) const {
  if (count == 0) throw std::invalid_argument("point count must be >= 1");
  if (bit_depth_ < 64 && count > (std::uint64_t{1} << bit_depth_)) {
    throw std::out_of_range("point count exceeds 2^bit_depth");
  }
}

std::vector<std::uint64_t> DigitalNetGenerator::digits(std::uint64_t begin,
                                                       std::size_t count) const {
  check_count(begin + count);
  const std::size_t d = dimension_;
  std::vector<std::uint64_t> out(count * d);
  std::vector<std::uint64_t> x(d, 0);
  const std::uint64_t gray = begin ^ (begin >> 1);
  for (std::size_t j = 0; j < d; ++j) {
    const auto v = directions(j);
    for (unsigned k = 0; k < bit_depth_; ++k) {
      if ((gray >> k) & 1u) x[j] ^= v[k];
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      const unsigned c = static_cast<unsigned>(std::countr_zero(begin + i));
      for (std::size_t j = 0; j < d; ++j) x[j] ^= v_[j * bit_depth_ + c];
    }
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = x[j];
  }
  return out;
}

namespace {

double digits_to_unit(std::uint64_t x, unsigned bit_depth) {
  return std::ldexp(static_cast<double>(x), -static_cast<int>(bit_depth));
}

}  // namespace

PointSet generate(const DigitalNetGenerator& gen, std::size_t M) {
  const auto dig = gen.digits(0, M);
  std::vector<double> data(dig.size());
  for (std::size_t i = 0; i < dig.size(); ++i) data[i] = digits_to_unit(dig[i], gen.bit_depth());
  return PointSet(M, gen.dimension(), std::move(data));
}

std::uint64_t scramble_tree_seed(ScrambleKey key, std::size_t dim) {
  return hash_combine(hash_combine(mix64(key.seed ^ 0x5851F42D4C957F2Dull), key.stream_index),
                      dim);
}

std::uint64_t owen_scramble_digits(std::uint64_t x, std::uint64_t tree_seed, unsigned bit_depth) {
  // Node (k, prefix) of the binary permutation tree is labelled (1 << k) | prefix,
  // which is unique across depths; its flip bit is a hash of that label.
  std::uint64_t flips = 0;
  for (unsigned k = 0; k < bit_depth; ++k) {
    const std::uint64_t prefix = k == 0 ? 0 : x >> (bit_depth - k);
    const std::uint64_t node = (std::uint64_t{1} << k) | prefix;
    const std::uint64_t h = mix64(tree_seed + node * 0xD1B54A32D192ED03ull);
    flips |= (h >> 63) << (bit_depth - 1 - k);
  }
  return x ^ flips;
}

PointSet owen_scramble(const DigitalNetGenerator& gen, std::size_t M, ScrambleKey key) {
  const auto dig = gen.digits(0, M);
  const std::size_t d = gen.dimension();
  std::vector<std::uint64_t> seeds(d);
  for (std::size_t j = 0; j < d; ++j) seeds[j] = scramble_tree_seed(key, j);
  std::vector<double> data(dig.size());
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      data[i * d + j] =
          digits_to_unit(owen_scramble_digits(dig[i * d + j], seeds[j], gen.bit_depth()),
                         gen.bit_depth());
    }
  }
  return PointSet(M, d, std::move(data));
}

PointSet shift_mod1(const PointSet& ps, std::span<const double> shift) {
  if (shift.size() != ps.dim()) throw std::invalid_argument("shift_mod1: dimension mismatch");
  for (double s : shift) {
    if (!std::isfinite(s)) throw std::invalid_argument("shift_mod1: non-finite shift");
  }
  PointSet out = ps;
  for (std::size_t i = 0; i < ps.count(); ++i) {
    for (std::size_t j = 0; j < ps.dim(); ++j) {
      double v = ps(i, j) + shift[j];
      v -= std::floor(v);
      if (v >= 1.0) v = 0.0;  // floor rounding for tiny negative inputs
      out(i, j) = v;
    }
  }
  return out;
}

double l2_star_discrepancy(const PointSet& ps) {
  const std::size_t M = ps.count();
  const std::size_t d = ps.dim();
  if (M == 0) throw std::invalid_argument("l2_star_discrepancy: empty point set");
  double single = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < d; ++j) p *= 0.5 * (1.0 - ps(i, j) * ps(i, j));
    single += p;
  }
  double pair = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    double diag = 1.0;
    for (std::size_t j = 0; j < d; ++j) diag *= 1.0 - ps(i, j);
    double off = 0.0;
    for (std::size_t k = i + 1; k < M; ++k) {
      double p = 1.0;
      for (std::size_t j = 0; j < d; ++j) p *= 1.0 - std::max(ps(i, j), ps(k, j));
      off += p;
    }
    pair += diag + 2.0 * off;
  }
  const double Md = static_cast<double>(M);
  const double sq = std::pow(3.0, -static_cast<double>(d)) - 2.0 * single / Md + pair / (Md * Md);
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace mlqmc
