#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mlqmc/lowdisc.hpp"

#ifndef MLQMC_DATA_DIR
#define MLQMC_DATA_DIR "data"
#endif

namespace mlqmc {

DirectionTable DirectionTable::parse(std::istream& in) {
  DirectionTable table;
  std::string line;
  unsigned expected = 2;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    DirectionEntry e;
    if (!(ls >> e.d)) continue;  // header or blank line
    if (!(ls >> e.s >> e.a) || e.s == 0) {
      throw std::runtime_error("direction table: malformed line: " + line);
    }
    if (e.d != expected) {
      throw std::runtime_error("direction table: dimensions must be consecutive from 2");
    }
    e.m.resize(e.s);
    for (auto& m : e.m) {
      if (!(ls >> m)) throw std::runtime_error("direction table: missing m_i on line: " + line);
    }
    for (unsigned k = 0; k < e.s; ++k) {
      if (e.m[k] % 2 == 0 || e.m[k] >= (std::uint64_t{1} << (k + 1))) {
        throw std::runtime_error("direction table: m_i must be odd and below 2^i");
      }
    }
    table.entries_.push_back(std::move(e));
    ++expected;
  }
  return table;
}

DirectionTable DirectionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open direction table " + path.string());
  return parse(in);
}

const DirectionTable& DirectionTable::bundled() {
  static const DirectionTable table = [] {
    const char* env = std::getenv("MLQMC_DIRECTION_FILE");
    return load(env ? std::filesystem::path(env)
                    : std::filesystem::path(MLQMC_DATA_DIR) / "joe_kuo_d21.txt");
  }();
  return table;
}

const DirectionEntry& DirectionTable::entry(std::size_t dim) const {
  if (dim < 2 || dim > max_dimension()) {
    throw std::out_of_range("dimension " + std::to_string(dim) + " not covered by direction table");
  }
  return entries_[dim - 2];
}

}  // namespace mlqmc
