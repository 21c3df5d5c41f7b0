#pragma once

#include <string>
#include <vector>

namespace stanceval {

// Fraction in [0,1] rendered as a percentage with 2 decimals ("66.99").
std::string format_pct(double fraction);
std::string format_num(double value, int decimals = 4);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_text() const;      // aligned columns
  std::string to_csv() const;
  std::string to_markdown() const;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace stanceval
