#include "dronesim/plot.hpp"

#include <fstream>
#include <stdexcept>
#include <string_view>

namespace dronesim {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

}  // namespace

void emit_plot_data(std::istream& log, const std::vector<std::string>& fields, std::ostream& out) {
  std::string header;
  if (!std::getline(log, header)) throw std::invalid_argument("empty log");
  const auto columns = split_row(header);

  std::vector<std::size_t> picks;
  for (const auto& f : fields) {
    std::size_t idx = columns.size();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == f) {
        idx = c;
        break;
      }
    }
    if (idx == columns.size()) throw std::invalid_argument("unknown field: " + f);
    picks.push_back(idx);
  }

  auto emit = [&](const std::vector<std::string_view>& cells) {
    for (std::size_t k = 0; k < picks.size(); ++k) {
      if (k) out << ',';
      out << cells[picks[k]];
    }
    out << '\n';
  };

  emit(columns);
  std::string line;
  std::size_t row = 1;
  while (std::getline(log, line)) {
    ++row;
    const auto cells = split_row(line);
    if (cells.size() != columns.size()) {
      throw std::invalid_argument("malformed log row " + std::to_string(row));
    }
    emit(cells);
  }
}

void emit_plot_data(const std::filesystem::path& log, const std::vector<std::string>& fields,
                    std::ostream& out) {
  std::ifstream in(log, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open log: " + log.string());
  emit_plot_data(in, fields, out);
}

}  // namespace dronesim
