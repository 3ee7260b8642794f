#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace inrad::cli::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<std::pair<double, double>> shaded;  // x ranges drawn behind the lines
  std::optional<double> hline;
  bool log_x = false;
};

void write_line_plot(const LinePlot& plot, const std::filesystem::path& path);

void write_bar_plot(const std::string& title, const std::string& y_label,
                    const std::vector<std::string>& labels, const std::vector<double>& values,
                    const std::filesystem::path& path);

}  // namespace inrad::cli::svg
