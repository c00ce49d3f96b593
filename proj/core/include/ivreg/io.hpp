#pragma once

#include "ivreg/lp.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/signal.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ivreg::io {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

/// One value per line, no header.
std::string signal_to_csv(const Signal& u);
Signal signal_from_csv(const std::string& text, double h = 1.0);

/// {"h": ..., "values": [...]}
std::string signal_to_json(const Signal& u);
Signal signal_from_json(const std::string& text);

/// One matrix row per line, comma separated.
std::string operator_to_csv(const DenseOperator& a);
DenseOperator operator_from_csv(const std::string& text);

/// Named vectors and row-major matrices; free variables carry a null lower bound.
std::string lp_to_json(const lp::LpProblem& p);
lp::LpProblem lp_from_json(const std::string& text);

/// Throws InputError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ivreg::io
