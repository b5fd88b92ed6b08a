#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mlqmc {

// One row of a Joe-Kuo style table: dimension d, degree s, polynomial code a,
// initial direction integers m_1..m_s.
struct DirectionEntry {
  unsigned d = 0;
  unsigned s = 0;
  std::uint64_t a = 0;
  std::vector<std::uint64_t> m;
};

class DirectionTable {
 public:
  static DirectionTable parse(std::istream& in);
  static DirectionTable load(const std::filesystem::path& path);
  // Table shipped with the library. MLQMC_DIRECTION_FILE overrides the path.
  static const DirectionTable& bundled();

  // Number of dimensions covered, counting the implicit first dimension.
  std::size_t max_dimension() const { return entries_.size() + 1; }
  const DirectionEntry& entry(std::size_t dim) const;  // dim >= 2

 private:
  std::vector<DirectionEntry> entries_;
};

class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t count, std::size_t dim);
  PointSet(std::size_t count, std::size_t dim, std::vector<double> data);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const { return data_; }

  PointSet prefix(std::size_t count) const;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct ScrambleKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

class DigitalNetGenerator {
 public:
  static constexpr unsigned kDefaultBitDepth = 52;

  DigitalNetGenerator(std::size_t dimension, unsigned bit_depth, const DirectionTable& table);
  explicit DigitalNetGenerator(std::size_t dimension, unsigned bit_depth = kDefaultBitDepth);

  std::size_t dimension() const { return dimension_; }
  unsigned bit_depth() const { return bit_depth_; }
  // Generating integers of dimension j (0-based); entry k carries digit k+1.
  std::span<const std::uint64_t> directions(std::size_t j) const {
    return {v_.data() + j * bit_depth_, bit_depth_};
  }

  // Digits of points [begin, begin + count) in Gray-code order, row-major.
  std::vector<std::uint64_t> digits(std::uint64_t begin, std::size_t count) const;
  void check_count(std::uint64_t count) const;

 private:
  std::size_t dimension_;
  unsigned bit_depth_;
  std::vector<std::uint64_t> v_;
};

PointSet generate(const DigitalNetGenerator& gen, std::size_t M);
PointSet owen_scramble(const DigitalNetGenerator& gen, std::size_t M, ScrambleKey key);
PointSet shift_mod1(const PointSet& ps, std::span<const double> shift);
double l2_star_discrepancy(const PointSet& ps);

// Nested scramble of one coordinate's bit_depth digits. Exposed for tests.
std::uint64_t owen_scramble_digits(std::uint64_t x, std::uint64_t tree_seed, unsigned bit_depth);
std::uint64_t scramble_tree_seed(ScrambleKey key, std::size_t dim);

}  // namespace mlqmc
