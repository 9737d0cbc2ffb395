#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"

namespace spoiler {

// Line-oriented text format:
//   p c
//   then per district:
//   m n k
//   a_0 ... a_{m-1}          party of each candidate (0-based)
//   n lines of m candidates   one vote each, best first (0-based)
// Blank lines and lines starting with '#' are skipped. Parties are named P1..Pp.
inline void write_election(std::ostream& out, const MultiDistrictElection& e) {
  out << e.num_parties() << ' ' << e.num_districts() << '\n';
  for (int d = 0; d < e.num_districts(); ++d) {
    const auto& de = e.district(d);
    out << de.num_candidates() << ' ' << de.num_voters() << ' ' << e.seats()[static_cast<std::size_t>(d)] << '\n';
    for (int c = 0; c < de.num_candidates(); ++c) out << (c ? " " : "") << de.party_of(c);
    out << '\n';
    for (int v = 0; v < de.num_voters(); ++v) {
      const auto vote = de.vote(v);
      for (std::size_t r = 0; r < vote.size(); ++r) out << (r ? " " : "") << vote[r];
      out << '\n';
    }
  }
}

namespace detail {
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<long long> next(std::size_t expected, const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      std::istringstream ss(line);
      std::vector<long long> out;
      std::string tok;
      while (ss >> tok) {
        try {
          std::size_t used = 0;
          out.push_back(std::stoll(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(line_) + ": '" + tok + "' is not an integer (" + what + ")");
        }
      }
      if (out.size() != expected) {
        throw ParseError("line " + std::to_string(line_) + ": expected " + std::to_string(expected) + " values (" +
                         what + "), got " + std::to_string(out.size()));
      }
      return out;
    }
    throw ParseError("unexpected end of input after line " + std::to_string(line_) + " (expected " + what + ")");
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};
}  // namespace detail

inline MultiDistrictElection read_election(std::istream& in) {
  detail::LineReader r(in);
  const auto head = r.next(2, "header 'p c'");
  const auto p = head[0], c = head[1];
  if (p < 1 || c < 1) throw ParseError("line " + std::to_string(r.line()) + ": p and c must be positive");
  std::vector<DistrictElection> districts;
  std::vector<int> seats;
  for (long long d = 0; d < c; ++d) {
    const auto dims = r.next(3, "district header 'm n k'");
    const auto m = dims[0], n = dims[1], k = dims[2];
    if (m < 1 || n < 1 || k < 1) throw ParseError("line " + std::to_string(r.line()) + ": m, n and k must be positive");
    const auto aff = r.next(static_cast<std::size_t>(m), "affiliation line");
    std::vector<int> affiliation(aff.begin(), aff.end());
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(m * n));
    for (long long v = 0; v < n; ++v) {
      const auto vote = r.next(static_cast<std::size_t>(m), "vote");
      flat.insert(flat.end(), vote.begin(), vote.end());
    }
    try {
      districts.emplace_back(std::move(affiliation), static_cast<int>(p), static_cast<int>(n), std::move(flat));
    } catch (const Error& ex) {
      throw ParseError("district " + std::to_string(d) + " ending at line " + std::to_string(r.line()) + ": " + ex.what());
    }
    seats.push_back(static_cast<int>(k));
  }
  return MultiDistrictElection(PartyRoster::numbered(static_cast<int>(p)), std::move(districts), std::move(seats));
}

}  // namespace spoiler
