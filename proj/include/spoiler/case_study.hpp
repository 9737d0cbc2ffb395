#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/jdh.hpp"
#include "spoiler/metrics.hpp"
#include "spoiler/parallel.hpp"

namespace spoiler {

enum class PartyKind { Party, Coalition };

struct PartyInfo {
  std::string name;
  PartyKind kind = PartyKind::Party;
  double x = 0.0;
  double y = 0.0;
};

struct ShareDistrict {
  std::string id;
  int k = 0;
  std::vector<double> votes;  // one count per party
};

struct ShareElection {
  std::vector<PartyInfo> parties;
  std::vector<ShareDistrict> districts;
  double party_threshold = 0.05;
  double coalition_threshold = 0.08;
  bool strict_threshold = true;

  int num_parties() const { return static_cast<int>(parties.size()); }

  void validate() const {
    if (parties.empty()) throw DimensionError("share election needs at least one party");
    PartyRoster roster([&] {
      std::vector<std::string> names;
      for (const auto& p : parties) names.push_back(p.name);
      return names;
    }());
    for (const auto& p : parties) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("party '" + p.name + "' has non-finite coordinates");
    }
    if (districts.empty()) throw DimensionError("share election needs at least one district");
    for (const auto& d : districts) {
      if (d.k < 1) throw DomainError("district '" + d.id + "' must elect at least one member");
      if (static_cast<int>(d.votes.size()) != num_parties()) {
        throw DimensionError("district '" + d.id + "' has " + std::to_string(d.votes.size()) + " vote counts for " +
                             std::to_string(num_parties()) + " parties");
      }
      for (double v : d.votes) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("district '" + d.id + "' has a negative vote count");
      }
    }
  }

  int total_seats() const {
    int s = 0;
    for (const auto& d : districts) s += d.k;
    return s;
  }

  std::vector<double> national_votes() const {
    std::vector<double> out(parties.size(), 0.0);
    for (const auto& d : districts) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += d.votes[i];
    }
    return out;
  }

  std::vector<double> national_shares() const {
    auto v = national_votes();
    double total = 0.0;
    for (double x : v) total += x;
    if (total <= 0.0) throw DegenerateInput("national vote total is zero");
    for (double& x : v) x /= total;
    return v;
  }
};

inline std::vector<bool> apply_thresholds(const ShareElection& e) {
  const auto shares = e.national_shares();
  std::vector<bool> eligible(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double t = e.parties[i].kind == PartyKind::Coalition ? e.coalition_threshold : e.party_threshold;
    eligible[i] = e.strict_threshold ? shares[i] > t : shares[i] >= t;
  }
  return eligible;
}

struct ShareAllocation {
  std::vector<double> seats;  // national; fractional only after an interpolated tie
  Allocation shares;
  std::vector<bool> eligible;
  bool tie = false;
};

// Jefferson-D'Hondt in every district among the eligible parties. Pass `eligible` to override the
// threshold test.
inline ShareAllocation allocate_share_election(const ShareElection& e, const std::vector<bool>* eligible = nullptr,
                                               int threads = 1) {
  e.validate();
  ShareAllocation r;
  r.eligible = eligible ? *eligible : apply_thresholds(e);
  if (static_cast<int>(r.eligible.size()) != e.num_parties()) throw DimensionError("eligibility mask has wrong length");
  std::vector<int> idx;
  for (int i = 0; i < e.num_parties(); ++i) {
    if (r.eligible[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  if (idx.empty()) throw DegenerateInput("no party passes the threshold");

  std::vector<JdhResult> per(e.districts.size());
  parallel_for(e.districts.size(), threads, [&](std::size_t d) {
    std::vector<double> v;
    for (int i : idx) v.push_back(e.districts[d].votes[static_cast<std::size_t>(i)]);
    try {
      per[d] = jdh_exact(v, e.districts[d].k);
    } catch (const DegenerateInput&) {
      throw DegenerateInput("district '" + e.districts[d].id + "' has no votes for eligible parties");
    }
  });

  r.seats.assign(static_cast<std::size_t>(e.num_parties()), 0.0);
  for (const auto& res : per) {
    r.tie = r.tie || res.tie;
    for (std::size_t j = 0; j < idx.size(); ++j) r.seats[static_cast<std::size_t>(idx[j])] += res.seats[j];
  }
  const double total = e.total_seats();
  std::vector<double> s;
  for (double x : r.seats) s.push_back(x / total);
  r.shares = Allocation(std::move(s));
  return r;
}

// Removes party i and hands its votes in every district to the others in proportion to
// 1 / distance between ideal points.
inline ShareElection remove_with_redistribution(const ShareElection& e, int i) {
  const int p = e.num_parties();
  if (p < 2) throw DomainError("removal needs at least two parties");
  if (i < 0 || i >= p) throw DimensionError("party index out of range");
  const auto& pi = e.parties[static_cast<std::size_t>(i)];
  std::vector<double> weight(static_cast<std::size_t>(p), 0.0);
  double total = 0.0;
  for (int j = 0; j < p; ++j) {
    if (j == i) continue;
    const auto& pj = e.parties[static_cast<std::size_t>(j)];
    const double d = std::hypot(pj.x - pi.x, pj.y - pi.y);
    if (d == 0.0) throw CoincidentPoint("parties '" + pi.name + "' and '" + pj.name + "' share an ideal point");
    weight[static_cast<std::size_t>(j)] = 1.0 / d;
    total += 1.0 / d;
  }
  ShareElection out = e;
  out.parties.erase(out.parties.begin() + i);
  for (std::size_t d = 0; d < e.districts.size(); ++d) {
    const auto& src = e.districts[d].votes;
    std::vector<double> v;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      v.push_back(src[static_cast<std::size_t>(j)] + src[static_cast<std::size_t>(i)] * weight[static_cast<std::size_t>(j)] / total);
    }
    out.districts[d].votes = std::move(v);
  }
  return out;
}

struct CaseStudyOptions {
  bool reapply_thresholds = true;
  ImpactScale scale = ImpactScale::Half;
  int threads = 1;
};

struct CaseStudyRow {
  std::string name;
  double share = 0.0;
  double seats = 0.0;
  double x = 0.0;
  double y = 0.0;
  double lambda = 0.0;
  std::vector<std::string> spoilees;  // parties gaining seat share when this one is removed
};

struct CaseStudyReport {
  std::vector<CaseStudyRow> rows;
  bool tie = false;
};

inline CaseStudyReport case_study_lambda(const ShareElection& e, const CaseStudyOptions& opt = {}) {
  const auto base = allocate_share_election(e, nullptr, opt.threads);
  const auto shares = e.national_shares();
  CaseStudyReport report;
  report.tie = base.tie;
  const int p = e.num_parties();
  for (int i = 0; i < p; ++i) {
    const auto removed = remove_with_redistribution(e, i);
    std::vector<bool> keep;
    if (!opt.reapply_thresholds) {
      for (int j = 0; j < p; ++j) {
        if (j != i) keep.push_back(base.eligible[static_cast<std::size_t>(j)]);
      }
    }
    const auto alt = allocate_share_election(removed, opt.reapply_thresholds ? nullptr : &keep, opt.threads);
    report.tie = report.tie || alt.tie;
    const Allocation restricted = alt.shares.embed_zero(i);
    CaseStudyRow row;
    const auto& party = e.parties[static_cast<std::size_t>(i)];
    row.name = party.name;
    row.share = shares[static_cast<std::size_t>(i)];
    row.seats = base.seats[static_cast<std::size_t>(i)];
    row.x = party.x;
    row.y = party.y;
    row.lambda = scale_factor(opt.scale) * excess_impact(base.shares, restricted, i);
    for (int j = 0; j < p; ++j) {
      if (j != i && restricted[j] > base.shares[j] + kShareTolerance) row.spoilees.push_back(e.parties[static_cast<std::size_t>(j)].name);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, int line, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": field '" + field + "' is not a number: '" + s + "'");
  }
}

// Reads non-empty, non-comment lines; the first is the header.
inline std::vector<std::pair<int, std::vector<std::string>>> read_csv(std::istream& in) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    rows.emplace_back(n, split_csv_line(line));
  }
  return rows;
}
}  // namespace detail

// Columns: name, kind (party | coalition), x, y.
inline std::vector<PartyInfo> read_party_metadata(std::istream& in) {
  const auto rows = detail::read_csv(in);
  if (rows.empty()) throw ParseError("party metadata is empty; expected header name,kind,x,y");
  const std::vector<std::string> header = {"name", "kind", "x", "y"};
  if (rows[0].second != header) throw ParseError("line " + std::to_string(rows[0].first) + ": expected header name,kind,x,y");
  std::vector<PartyInfo> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    if (f.size() != 4) throw ParseError("line " + std::to_string(line) + ": expected 4 fields, got " + std::to_string(f.size()));
    PartyInfo p;
    p.name = f[0];
    if (f[1] == "party") p.kind = PartyKind::Party;
    else if (f[1] == "coalition") p.kind = PartyKind::Coalition;
    else throw ParseError("line " + std::to_string(line) + ": field 'kind' must be party or coalition");
    p.x = detail::parse_number(f[2], line, "x");
    p.y = detail::parse_number(f[3], line, "y");
    out.push_back(std::move(p));
  }
  if (out.empty()) throw ParseError("party metadata lists no parties");
  return out;
}

// Columns: district_id, k, then one vote column per party in metadata order.
inline std::vector<ShareDistrict> read_district_votes(std::istream& in, int num_parties) {
  const auto rows = detail::read_csv(in);
  if (rows.empty()) throw ParseError("district file is empty; expected header district_id,k,<party votes>");
  const auto& header = rows[0].second;
  if (header.size() < 2 || header[0] != "district_id" || header[1] != "k") {
    throw ParseError("line " + std::to_string(rows[0].first) + ": header must start with district_id,k");
  }
  if (static_cast<int>(header.size()) != 2 + num_parties) {
    throw ParseError("line " + std::to_string(rows[0].first) + ": expected " + std::to_string(num_parties) +
                     " vote columns, got " + std::to_string(header.size() - 2));
  }
  std::vector<ShareDistrict> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    if (f.size() != header.size()) {
      throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(header.size()) + " fields");
    }
    ShareDistrict d;
    d.id = f[0];
    const double k = detail::parse_number(f[1], line, "k");
    if (k != std::floor(k) || k < 1) throw ParseError("line " + std::to_string(line) + ": field 'k' must be a positive integer");
    d.k = static_cast<int>(k);
    for (std::size_t c = 2; c < f.size(); ++c) d.votes.push_back(detail::parse_number(f[c], line, header[c]));
    out.push_back(std::move(d));
  }
  return out;
}

inline void write_case_study_report(std::ostream& out, const CaseStudyReport& r) {
  out << "name,share,seats,x,y,lambda\n";
  char buf[256];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.6g,%.3f,%.3f,%.3f\n", row.share, row.seats, row.x, row.y, row.lambda);
    out << row.name << buf;
  }
}

}  // namespace spoiler
