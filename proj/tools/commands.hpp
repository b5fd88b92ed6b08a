#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlqmc/allocation.hpp"
#include "mlqmc/models.hpp"
#include "mlqmc/pilot.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc::cli {

struct Options {
  std::string command;
  std::string model = "linear";
  std::vector<double> tol{1e-2};
  std::uint64_t seed = 1;
  std::size_t S = 1;
  std::size_t R = 1;
  std::size_t M0 = 256;
  double h0 = 1.0 / 16;
  unsigned threads = 1;
  std::optional<TruncationSpec> truncate;
  std::filesystem::path out = ".";
  bool quick = false;

  std::size_t pilot_S = 0;  // 0: model default
  std::optional<double> a_max;
  double epsilon = 0.0;
  std::size_t repeats = 100;
  double tol_ref = 1e-3;
  std::size_t ref_runs = 20;
  std::optional<std::filesystem::path> constants;
  std::optional<std::filesystem::path> plan;
};

// Lines written as "# key=value" ahead of every CSV.
std::vector<std::string> manifest(const Options& o);

// Buffers a CSV and publishes it through a .partial file and a rename.
class CsvFile {
 public:
  CsvFile(std::vector<std::string> header_comments, std::string columns);
  void row(const std::vector<std::string>& fields);
  void comment(const std::string& line);
  void commit(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> comments_;
  std::string columns_;
  std::vector<std::string> rows_;
};

std::string num(double v);
std::string num(std::size_t v);
std::string res_str(Resolution r);

std::unique_ptr<EigModel> make_model(const Options& o);
ScheduleShape schedule_shape(const Options& o);

// Constants file written by the pilot command and read by the others.
void write_constants(const std::filesystem::path& path, const Options& o, const PilotReport& rep,
                     const RateConstants& c);
RateConstants read_constants(const std::filesystem::path& path, const std::string& model);

void write_plan(const std::filesystem::path& path, const Options& o, const AllocationPlan& plan,
                const RateConstants& c);
LevelSchedule read_plan(const std::filesystem::path& path);

int cmd_pilot(const Options& o);
int cmd_allocate(const Options& o);
int cmd_estimate(const Options& o);
int cmd_consistency(const Options& o);
int cmd_baselines(const Options& o);
int cmd_figures_data(const Options& o);

}  // namespace mlqmc::cli
