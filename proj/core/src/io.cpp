#include "beamlearn/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>
#include <system_error>
#include <unistd.h>

namespace beamlearn::io {

namespace {

constexpr std::string_view kDatasetMagic = "beamlearn-dataset";
constexpr std::string_view kResultsMagic = "beamlearn-results";
constexpr std::string_view kResultsColumns = "sweep_var,method,mean_sum_rate,stderr,n_samples";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view token, T& value) {
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc{} && ptr == end && !token.empty();
}

std::string mask_to_hex(std::uint64_t mask, int n_beams) {
  const int digits = (n_beams + 3) / 4;
  std::string out(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = "0123456789abcdef"[mask & 0xf];
    mask >>= 4;
  }
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_real(v[i]);
  }
  return out;
}

std::string join_uints(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string to_text(const auto& value, auto writer) {
  std::ostringstream os;
  writer(os, value);
  return os.str();
}

// Header reader shared by both formats: pulls the next line and checks that
// it reads "<prefix><key> <value>".
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    line = std::string(strip_cr(line));
    return true;
  }

  [[nodiscard]] std::size_t line_no() const { return line_no_; }

  std::string_view header_value(std::string_view prefix, std::string_view key) {
    if (!next(buffer_))
      throw ParseError(ParseErrorKind::kMalformedHeader, line_no_ + 1,
                       "missing header line '" + std::string(key) + "'");
    std::string_view line = buffer_;
    if (!line.starts_with(prefix))
      throw ParseError(ParseErrorKind::kMalformedHeader, line_no_,
                       "expected header line '" + std::string(key) + "'");
    line.remove_prefix(prefix.size());
    const auto tokens = split_ws(line);
    if (tokens.size() != 2 || tokens[0] != key)
      throw ParseError(ParseErrorKind::kMalformedHeader, line_no_,
                       "expected '" + std::string(key) + " <value>'");
    return tokens[1];
  }

  template <class T>
  T header_number(std::string_view prefix, std::string_view key) {
    const auto token = header_value(prefix, key);
    T value{};
    if (!parse_number(token, value))
      throw ParseError(ParseErrorKind::kMalformedHeader, line_no_,
                       "bad value '" + std::string(token) + "' for " + std::string(key));
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value))
        throw ParseError(ParseErrorKind::kNonFinite, line_no_,
                         "non-finite value for " + std::string(key));
    }
    return value;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::string buffer_;
};

double record_real(std::string_view token, std::size_t line, const char* what) {
  double value = 0.0;
  if (!parse_number(token, value))
    throw ParseError(ParseErrorKind::kMalformedRecord, line,
                     std::string("cannot parse ") + what + " '" + std::string(token) + "'");
  if (!std::isfinite(value))
    throw ParseError(ParseErrorKind::kNonFinite, line, std::string("non-finite ") + what);
  return value;
}

LabeledExample parse_record(std::string_view line, std::size_t line_no,
                            const SystemConfig& config) {
  const auto tokens = split_ws(line);
  const auto k = static_cast<std::size_t>(config.n_users);
  if (tokens.size() != 2 * k + 3)
    throw ParseError(ParseErrorKind::kMalformedRecord, line_no,
                     "expected " + std::to_string(2 * k + 3) + " fields, found " +
                         std::to_string(tokens.size()));

  LabeledExample ex;
  if (!parse_number(tokens[0], ex.layout_id))
    throw ParseError(ParseErrorKind::kMalformedRecord, line_no,
                     "bad layout id '" + std::string(tokens[0]) + "'");
  ex.layout.layout_id = ex.layout_id;
  ex.layout.positions.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& p = ex.layout.positions[i];
    p.rho = record_real(tokens[1 + i], line_no, "rho");
    p.theta = record_real(tokens[1 + k + i], line_no, "theta");
    if (p.rho < config.min_radius || p.rho > 1.0)
      throw ParseError(ParseErrorKind::kOutOfRange, line_no,
                       "rho " + format_real(p.rho) + " outside [min_radius, 1]");
    if (!(p.theta > 0.0 && p.theta < std::numbers::pi))
      throw ParseError(ParseErrorKind::kOutOfRange, line_no,
                       "theta " + format_real(p.theta) + " outside (0, pi)");
  }

  const auto mask_token = tokens[2 * k + 1];
  if (mask_token.size() > 16)
    throw ParseError(ParseErrorKind::kMaskWidth, line_no, "mask wider than 64 bits");
  std::uint64_t mask = 0;
  const auto* end = mask_token.data() + mask_token.size();
  const auto [ptr, ec] = std::from_chars(mask_token.data(), end, mask, 16);
  if (ec != std::errc{} || ptr != end || mask_token.empty())
    throw ParseError(ParseErrorKind::kMalformedRecord, line_no,
                     "bad hex mask '" + std::string(mask_token) + "'");
  if (config.n_beams < 64 && (mask >> config.n_beams) != 0)
    throw ParseError(ParseErrorKind::kMaskWidth, line_no,
                     "mask " + std::string(mask_token) + " wider than " +
                         std::to_string(config.n_beams) + " bits");
  if (std::popcount(mask) > config.n_users)
    throw ParseError(ParseErrorKind::kOutOfRange, line_no,
                     "mask activates more beams than there are users");
  ex.label = ActiveBeamSet(mask);

  ex.oracle_sum_rate = record_real(tokens[2 * k + 2], line_no, "oracle_sum_rate");
  if (ex.oracle_sum_rate < 0.0)
    throw ParseError(ParseErrorKind::kOutOfRange, line_no, "negative oracle_sum_rate");

  ex.feature = extract_features(ex.layout);
  return ex;
}

}  // namespace

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformedHeader: return "malformed header";
    case ParseErrorKind::kMalformedRecord: return "malformed record";
    case ParseErrorKind::kRecordCount: return "record count mismatch";
    case ParseErrorKind::kNonFinite: return "non-finite value";
    case ParseErrorKind::kOutOfRange: return "value out of range";
    case ParseErrorKind::kMaskWidth: return "mask too wide";
  }
  return "parse error";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
    : std::runtime_error("line " + std::to_string(line) + ": " + std::string(to_string(kind)) +
                         ": " + detail),
      kind_(kind),
      line_(line) {}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

void write_dataset(std::ostream& out, const LabeledDataset& ds) {
  const auto& c = ds.config;
  out << kDatasetMagic << ' ' << kDatasetFormatVersion << '\n'
      << "n_beams " << c.n_beams << '\n'
      << "n_users " << c.n_users << '\n'
      << "snr_db " << format_real(c.snr_db) << '\n'
      << "alpha " << format_real(c.path_loss_exponent) << '\n'
      << "min_radius " << format_real(c.min_radius) << '\n'
      << "rng_seed " << c.rng_seed << '\n'
      << "n_examples " << ds.size() << '\n';
  for (const auto& ex : ds.examples) {
    if (ex.layout.positions.size() != static_cast<std::size_t>(c.n_users))
      throw DomainError("example " + std::to_string(ex.layout_id) +
                        " does not match the dataset's user count");
    out << ex.layout_id;
    for (const auto& p : ex.layout.positions) out << ' ' << format_real(p.rho);
    for (const auto& p : ex.layout.positions) out << ' ' << format_real(p.theta);
    out << ' ' << mask_to_hex(ex.label.mask(), c.n_beams) << ' '
        << format_real(ex.oracle_sum_rate) << '\n';
  }
}

LabeledDataset read_dataset(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line))
    throw ParseError(ParseErrorKind::kMalformedHeader, 1, "empty file");
  {
    const auto tokens = split_ws(line);
    int version = 0;
    if (tokens.size() != 2 || tokens[0] != kDatasetMagic || !parse_number(tokens[1], version))
      throw ParseError(ParseErrorKind::kMalformedHeader, 1, "not a beamlearn dataset");
    if (version != kDatasetFormatVersion)
      throw ParseError(ParseErrorKind::kMalformedHeader, 1,
                       "unsupported format version " + std::to_string(version));
  }

  LabeledDataset ds;
  auto& c = ds.config;
  c.n_beams = reader.header_number<int>("", "n_beams");
  c.n_users = reader.header_number<int>("", "n_users");
  c.snr_db = reader.header_number<double>("", "snr_db");
  c.path_loss_exponent = reader.header_number<double>("", "alpha");
  c.min_radius = reader.header_number<double>("", "min_radius");
  c.rng_seed = reader.header_number<std::uint64_t>("", "rng_seed");
  const auto n_examples = reader.header_number<std::uint64_t>("", "n_examples");
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ParseError(ParseErrorKind::kMalformedHeader, reader.line_no(), e.what());
  }

  while (reader.next(line)) {
    if (split_ws(line).empty()) continue;
    if (ds.size() == n_examples)
      throw ParseError(ParseErrorKind::kRecordCount, reader.line_no(),
                       "more records than the declared " + std::to_string(n_examples));
    ds.examples.push_back(parse_record(line, reader.line_no(), c));
  }
  if (ds.size() != n_examples)
    throw ParseError(ParseErrorKind::kRecordCount, reader.line_no() + 1,
                     "found " + std::to_string(ds.size()) + " records, header declares " +
                         std::to_string(n_examples));
  return ds;
}

void write_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, to_text(ds, [](std::ostream& os, const LabeledDataset& d) {
                      write_dataset(os, d);
                    }));
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in);
}

std::string_view to_string(SweepKind kind) {
  return kind == SweepKind::kSnr ? "snr" : "size";
}

void write_results(std::ostream& out, const ResultsFile& results) {
  const auto& cfg = results.config;
  const auto& c = cfg.base;
  out << "# " << kResultsMagic << ' ' << kResultsFormatVersion << '\n'
      << "# sweep " << to_string(results.sweep) << '\n'
      << "# n_beams " << c.n_beams << '\n'
      << "# n_users " << c.n_users << '\n'
      << "# snr_db " << format_real(c.snr_db) << '\n'
      << "# alpha " << format_real(c.path_loss_exponent) << '\n'
      << "# min_radius " << format_real(c.min_radius) << '\n'
      << "# rng_seed " << c.rng_seed << '\n'
      << "# snr_grid_db " << join_reals(cfg.snr_grid_db) << '\n'
      << "# training_sizes " << join_uints(cfg.training_sizes) << '\n'
      << "# n_test " << cfg.n_test << '\n'
      << "# k " << cfg.k << '\n'
      << "# train_fraction " << format_real(cfg.train_fraction) << '\n'
      << kResultsColumns << '\n';
  for (const auto& row : results.rows)
    out << format_real(row.sweep_var) << ',' << to_string(row.method) << ','
        << format_real(row.mean_sum_rate) << ',' << format_real(row.std_error) << ','
        << row.n_samples << '\n';
}

ResultsFile read_results(std::istream& in) {
  LineReader reader(in);
  ResultsFile results;
  {
    const auto version = reader.header_number<int>("# ", kResultsMagic);
    if (version != kResultsFormatVersion)
      throw ParseError(ParseErrorKind::kMalformedHeader, 1,
                       "unsupported results version " + std::to_string(version));
  }
  const auto sweep = reader.header_value("# ", "sweep");
  if (sweep == "snr") {
    results.sweep = SweepKind::kSnr;
  } else if (sweep == "size") {
    results.sweep = SweepKind::kSize;
  } else {
    throw ParseError(ParseErrorKind::kMalformedHeader, reader.line_no(),
                     "unknown sweep '" + std::string(sweep) + "'");
  }
  auto& cfg = results.config;
  cfg.base.n_beams = reader.header_number<int>("# ", "n_beams");
  cfg.base.n_users = reader.header_number<int>("# ", "n_users");
  cfg.base.snr_db = reader.header_number<double>("# ", "snr_db");
  cfg.base.path_loss_exponent = reader.header_number<double>("# ", "alpha");
  cfg.base.min_radius = reader.header_number<double>("# ", "min_radius");
  cfg.base.rng_seed = reader.header_number<std::uint64_t>("# ", "rng_seed");

  cfg.snr_grid_db.clear();
  for (auto tok : split(reader.header_value("# ", "snr_grid_db"), ',')) {
    double v = 0.0;
    if (!parse_number(tok, v) || !std::isfinite(v))
      throw ParseError(ParseErrorKind::kMalformedHeader, reader.line_no(), "bad SNR grid entry");
    cfg.snr_grid_db.push_back(v);
  }
  cfg.training_sizes.clear();
  for (auto tok : split(reader.header_value("# ", "training_sizes"), ',')) {
    std::uint64_t v = 0;
    if (!parse_number(tok, v))
      throw ParseError(ParseErrorKind::kMalformedHeader, reader.line_no(),
                       "bad training size entry");
    cfg.training_sizes.push_back(v);
  }
  cfg.n_test = reader.header_number<std::uint64_t>("# ", "n_test");
  cfg.k = reader.header_number<int>("# ", "k");
  cfg.train_fraction = reader.header_number<double>("# ", "train_fraction");

  std::string line;
  if (!reader.next(line) || line != kResultsColumns)
    throw ParseError(ParseErrorKind::kMalformedHeader, reader.line_no(),
                     "missing column header");

  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5)
      throw ParseError(ParseErrorKind::kMalformedRecord, reader.line_no(),
                       "expected 5 comma-separated fields");
    ResultRow row;
    row.sweep_var = record_real(fields[0], reader.line_no(), "sweep_var");
    try {
      row.method = method_from_string(fields[1]);
    } catch (const DomainError& e) {
      throw ParseError(ParseErrorKind::kMalformedRecord, reader.line_no(), e.what());
    }
    row.mean_sum_rate = record_real(fields[2], reader.line_no(), "mean_sum_rate");
    row.std_error = record_real(fields[3], reader.line_no(), "stderr");
    if (row.std_error < 0.0)
      throw ParseError(ParseErrorKind::kOutOfRange, reader.line_no(), "negative stderr");
    if (!parse_number(fields[4], row.n_samples))
      throw ParseError(ParseErrorKind::kMalformedRecord, reader.line_no(), "bad n_samples");
    results.rows.push_back(row);
  }
  return results;
}

void write_results(const ResultsFile& results, const std::filesystem::path& path) {
  write_file_atomic(path, to_text(results, [](std::ostream& os, const ResultsFile& r) {
                      write_results(os, r);
                    }));
}

ResultsFile read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_results(in);
}

}  // namespace beamlearn::io
