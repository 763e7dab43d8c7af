#pragma once

#include "gentune/surface/ast.hpp"

namespace gentune::surface {

// Parses a generator file into `into` (so several files can share one
// program: a generator plus its feature and validity functions).
void parse_program(const std::string& text, const std::string& file, Program& into);
Program parse_program(const std::string& text, const std::string& file = "<input>");
void load_program_file(const std::string& path, Program& into);

ExprPtr parse_expr(const std::string& text, const Program& program, const std::string& file = "<expr>");
ExprPtr parse_expr(const Datum& d, const Program& program);

Value parse_value(const Datum& d, const Program& program);
Value parse_value(const std::string& text, const Program& program);

std::string read_file(const std::string& path);

}  // namespace gentune::surface
