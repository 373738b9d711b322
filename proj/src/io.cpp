#include "sbts/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace sbts::io {

namespace {

std::vector<std::string_view>
split_csv_line(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template<class T>
T
parse_number(std::string_view text, std::size_t line_no)
{
  text = trim(text);
  T value{};
  const auto [ptr, ec] =
    std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidConfig("CSV line " + std::to_string(line_no) +
                        ": cannot parse '" + std::string(text) + "'");
  return value;
}

} // namespace

std::string
format_double(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void
write_panel_csv(std::ostream& out, const Panel& panel)
{
  out << "sample,t_index";
  for (std::size_t j = 0; j < panel.features(); ++j)
    out << ",f" << j;
  out << '\n';
  for (std::size_t m = 0; m < panel.samples(); ++m) {
    for (std::size_t i = 0; i < panel.length(); ++i) {
      out << m << ',' << i;
      for (std::size_t j = 0; j < panel.features(); ++j)
        out << ',' << format_double(panel(m, i, j));
      out << '\n';
    }
  }
}

Panel
read_panel_csv(std::istream& in, const TimeGrid& grid)
{
  std::string line;
  if (!std::getline(in, line))
    throw InvalidConfig("CSV input is empty");
  const auto header = split_csv_line(trim(line));
  if (header.size() < 3 || trim(header[0]) != "sample" ||
      trim(header[1]) != "t_index")
    throw InvalidConfig("CSV header must start with sample,t_index");
  const std::size_t d = header.size() - 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (trim(header[j + 2]) != "f" + std::to_string(j))
      throw InvalidConfig("CSV header column " + std::to_string(j + 2) +
                          " must be f" + std::to_string(j));
  }

  const std::size_t n = grid.size();
  std::vector<double> values;
  std::size_t line_no = 1;
  std::size_t expected_sample = 0, expected_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto fields = split_csv_line(trim(line));
    if (fields.size() != d + 2)
      throw InvalidConfig("CSV line " + std::to_string(line_no) + ": expected " +
                          std::to_string(d + 2) + " fields");
    const auto m = parse_number<std::size_t>(fields[0], line_no);
    const auto i = parse_number<std::size_t>(fields[1], line_no);
    if (m != expected_sample || i != expected_index)
      throw InvalidConfig("CSV line " + std::to_string(line_no) +
                          ": rows must be sorted by (sample, t_index) with " +
                          std::to_string(n) + " time points per sample");
    for (std::size_t j = 0; j < d; ++j)
      values.push_back(parse_number<double>(fields[j + 2], line_no));
    if (++expected_index == n) {
      expected_index = 0;
      ++expected_sample;
    }
  }
  if (expected_index != 0)
    throw InvalidConfig("CSV ends in the middle of sample " +
                        std::to_string(expected_sample));
  if (expected_sample == 0)
    throw InvalidConfig("CSV has no data rows");
  return Panel(expected_sample, grid, d, std::move(values));
}

Panel
read_panel_csv(const std::filesystem::path& path, const TimeGrid& grid)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidConfig("cannot open input file " + path.string());
  return read_panel_csv(in, grid);
}

void
write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out)
      throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() +
                ": " + ec.message());
  }
}

std::string
read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvalidConfig("cannot open input file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace sbts::io
