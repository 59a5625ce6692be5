#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace dronesim {

/// Copies the requested columns of a step log, in the requested order, with
/// values passed through verbatim. Throws std::invalid_argument naming the
/// first unknown field.
void emit_plot_data(std::istream& log, const std::vector<std::string>& fields, std::ostream& out);
void emit_plot_data(const std::filesystem::path& log, const std::vector<std::string>& fields,
                    std::ostream& out);

}  // namespace dronesim
