#pragma once

#include <string>
#include <vector>

namespace comemnet {

// Plain comma-separated values, no quoting (the formats used here never
// contain commas inside fields). Empty cells survive as empty strings.
std::vector<std::vector<std::string>> read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v); // shortest round-trip representation

} // namespace comemnet
