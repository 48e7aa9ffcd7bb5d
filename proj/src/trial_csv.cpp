#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "tiersim/io.hpp"

namespace tiersim {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void bad_row(long row, const std::string& message) {
  throw ValidationError("row " + std::to_string(row), message);
}

template <typename T>
T parse_number(std::string_view text, long row, const char* column) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    bad_row(row, std::string("column ") + column + ": cannot parse \"" + std::string(text) + "\"");
  }
  return value;
}

}  // namespace

std::string format_time(double seconds) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, seconds, std::chars_format::fixed);
  if (ec != std::errc()) return "nan";
  std::string out(buf, ptr);
  std::size_t dot = out.find('.');
  if (dot == std::string::npos) {
    out += '.';
    dot = out.size() - 1;
  }
  const std::size_t decimals = out.size() - dot - 1;
  if (decimals < 6) out.append(6 - decimals, '0');
  return out;
}

void write_trial_csv(std::ostream& out, const TrialLog& log) {
  out << kTrialCsvHeader << '\n';
  for (const TrialRecord& r : log.records) {
    out << r.terminal << ',' << r.generation << ',' << r.session << ',' << r.trial << ','
        << to_string(r.level) << ',' << format_time(r.submit_time) << ','
        << format_time(r.complete_time) << ',' << format_time(r.srt) << '\n';
  }
}

std::string trial_csv(const TrialLog& log) {
  std::ostringstream out;
  write_trial_csv(out, log);
  return out.str();
}

TrialLog read_trial_csv(std::istream& in) {
  TrialLog log;
  std::string line;
  if (!std::getline(in, line)) return log;  // zero-byte file
  if (line != kTrialCsvHeader) bad_row(0, "header must be exactly " + std::string(kTrialCsvHeader));

  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto fields = split(line, ',');
    if (fields.size() != 8) {
      bad_row(row, "expected 8 columns, found " + std::to_string(fields.size()));
    }
    TrialRecord r;
    r.terminal = parse_number<int>(fields[0], row, "terminal");
    r.generation = parse_number<int>(fields[1], row, "generation");
    r.session = parse_number<int>(fields[2], row, "session");
    r.trial = parse_number<int>(fields[3], row, "trial");
    const auto level = parse_level(fields[4]);
    if (!level) bad_row(row, "column level: unknown level \"" + std::string(fields[4]) + "\"");
    r.level = *level;
    r.submit_time = parse_number<double>(fields[5], row, "submit_s");
    r.complete_time = parse_number<double>(fields[6], row, "complete_s");
    r.srt = parse_number<double>(fields[7], row, "srt_s");

    if (r.terminal < 1) bad_row(row, "column terminal: must be >= 1");
    if (r.generation < 0) bad_row(row, "column generation: must be >= 0");
    if (r.session < 1) bad_row(row, "column session: must be >= 1");
    if (r.trial < 1) bad_row(row, "column trial: must be >= 1");
    if (!(r.submit_time >= 0.0) || !(r.complete_time >= r.submit_time)) {
      bad_row(row, "times must satisfy 0 <= submit_s <= complete_s");
    }
    if (!(r.srt > 0.0)) bad_row(row, "column srt_s: must be > 0");
    log.records.push_back(r);
  }
  return log;
}

TrialLog read_trial_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("csv", "cannot open " + path);
  return read_trial_csv(in);
}

}  // namespace tiersim
