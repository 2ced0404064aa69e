#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sfpkit/graph.hpp"

namespace sfpkit {

struct ParseError : std::runtime_error {
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    std::size_t line_number;
};

// Versioned text format:
//   SFPGRAPH v1 d=<d> alpha=<a> tau=<t> rho=<r> volume=<n> boundary=<box|torus> seed=<s>
//   V <count>
//   <id> <x1> ... <xd> <weight>        (one per vertex)
//   E <count>
//   <u> <v>                            (one per edge, u < v)
// Floats printed with 17 significant digits.
void serialize_graph(const SfpGraph& g, std::ostream& out);
void serialize_graph(const SfpGraph& g, const std::string& path);

SfpGraph deserialize_graph(std::istream& in, const std::string& path = "<stream>");
SfpGraph deserialize_graph(const std::string& path);

}  // namespace sfpkit
