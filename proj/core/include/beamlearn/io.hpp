#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamlearn/experiment.hpp"
#include "beamlearn/learning.hpp"

namespace beamlearn::io {

enum class ParseErrorKind {
  kMalformedHeader,
  kMalformedRecord,
  kRecordCount,
  kNonFinite,
  kOutOfRange,
  kMaskWidth,
};

std::string_view to_string(ParseErrorKind kind);

/// Rejected input file. `line()` is 1-based; a record-count shortfall is
/// reported at the line just past the end of the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail);

  [[nodiscard]] ParseErrorKind kind() const { return kind_; }
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kResultsFormatVersion = 1;

/// Dataset text format:
///
///   beamlearn-dataset 1
///   n_beams <N>
///   n_users <K>
///   snr_db <real>
///   alpha <real>
///   min_radius <real>
///   rng_seed <uint>
///   n_examples <count>
///   <layout_id> <rho_1..rho_K> <theta_1..theta_K> <mask> <oracle_sum_rate>
///
/// Fields are single-space separated, reals carry 17 significant digits and
/// the mask is lowercase hex, zero-padded to ceil(N/4) digits, bit n-1 for
/// beam n.
void write_dataset(std::ostream& out, const LabeledDataset& ds);
LabeledDataset read_dataset(std::istream& in);

/// File variants. Writing goes through a sibling temporary file that is
/// renamed into place only once complete.
void write_dataset(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_dataset(const std::filesystem::path& path);

enum class SweepKind { kSnr, kSize };

std::string_view to_string(SweepKind kind);

/// A results table plus the experiment settings that produced it.
struct ResultsFile {
  SweepKind sweep = SweepKind::kSnr;
  ExperimentConfig config;
  std::vector<ResultRow> rows;
};

/// Results format: '#'-prefixed "key value" comment lines recording the
/// experiment configuration, then a CSV header
/// "sweep_var,method,mean_sum_rate,stderr,n_samples" and one row per line.
/// `config.output_path` and `config.threads` are not recorded.
void write_results(std::ostream& out, const ResultsFile& results);
ResultsFile read_results(std::istream& in);

void write_results(const ResultsFile& results, const std::filesystem::path& path);
ResultsFile read_results(const std::filesystem::path& path);

/// Renders a real with 17 significant digits (round-trip exact).
std::string format_real(double x);

/// Writes `contents` to `path` via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace beamlearn::io
