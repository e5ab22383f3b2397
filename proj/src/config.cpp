#include "relaynet/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relaynet {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "'");
}

std::vector<double> parse_numbers(const std::string& v) {
  std::string cleaned = v;
  for (auto& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream s(cleaned);
  std::vector<double> out;
  double x;
  while (s >> x) out.push_back(x);
  std::string rest;
  if (s.fail() && !s.eof() && (s.clear(), s >> rest))
    throw std::invalid_argument("config: non-numeric entry '" + rest + "'");
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& v, const std::string& key) {
  std::vector<std::vector<double>> rows;
  std::string part;
  std::istringstream s(v);
  while (std::getline(s, part, ';')) {
    auto nums = parse_numbers(part);
    if (!nums.empty()) rows.push_back(nums);
  }
  if (rows.empty()) throw std::invalid_argument("config: empty matrix for '" + key + "'");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("config: ragged matrix for '" + key + "'");
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

TopologyConfig parse_topology_config(std::istream& in) {
  TopologyConfig cfg;
  bool saw_n = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value on line " +
                                  std::to_string(lineno));
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key == "n_relays") {
      cfg.n_relays = std::stoi(val);
      saw_n = true;
    } else if (key == "theta") {
      cfg.theta = std::stod(val);
    } else if (key == "snr_db") {
      cfg.snr_db = std::stod(val);
    } else if (key == "coherent") {
      cfg.coherent = parse_bool(val, key);
    } else if (key == "distance_matrix") {
      cfg.distance_matrix = parse_matrix(val, key);
    } else if (key == "positions") {
      // one row per node; a flat list is read as 1-D positions
      Eigen::MatrixXd m = parse_matrix(val, key);
      if (m.rows() == 1 && m.cols() > 1) m = m.transpose().eval();
      cfg.positions = m;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                  std::to_string(lineno));
    }
  }
  if (!saw_n) throw std::invalid_argument("config: n_relays is required");
  if (cfg.distance_matrix && cfg.positions)
    throw std::invalid_argument("config: give distance_matrix or positions, not both");
  return cfg;
}

TopologyConfig parse_topology_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_topology_config(f);
}

Topology TopologyConfig::build() const {
  if (distance_matrix)
    return make_topology(n_relays, *distance_matrix, theta, snr_db, coherent);
  if (positions) return topology_from_positions(n_relays, *positions, theta, snr_db, coherent);
  throw std::invalid_argument("config: distance_matrix or positions required");
}

Topology TopologyConfig::build_line_geometry(double r) const {
  if (n_relays != 2)
    throw std::invalid_argument("config: the line geometry sweep requires n_relays = 2");
  return two_relay_line_topology(r, theta, snr_db, coherent);
}

AllocationConfig parse_allocation_file(const std::string& path, int n_relays) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("alloc: cannot open '" + path + "'");
  AllocationConfig out;
  out.allocation = PowerAllocation::zeros(n_relays);
  std::vector<int> levels;
  std::vector<std::vector<int>> refine;
  for (int l = 1; l <= n_relays; ++l) {
    std::vector<int> t(n_relays - l + 1);
    for (int i = 0; i < static_cast<int>(t.size()); ++i) t[i] = l + 1 + i;
    refine.push_back(t);
  }
  for (int l = 1; l <= n_relays; ++l) levels.push_back(l);

  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("alloc: expected '=' on line " + std::to_string(lineno));
    std::istringstream head(strip(line.substr(0, eq)));
    const std::string val = strip(line.substr(eq + 1));
    std::string kind;
    head >> kind;
    std::vector<int> idx;
    int i;
    while (head >> i) idx.push_back(i);
    auto need = [&](size_t n) {
      if (idx.size() != n)
        throw std::invalid_argument("alloc: wrong index count on line " + std::to_string(lineno));
    };
    try {
      if (kind == "levels") {
        levels.clear();
        for (double v : parse_numbers(val)) levels.push_back(static_cast<int>(v));
      } else if (kind.rfind("refine_", 0) == 0) {
        const int l = std::stoi(kind.substr(7));
        if (l < 1 || l > n_relays) throw std::invalid_argument("alloc: bad refine level");
        refine[l - 1].clear();
        for (double v : parse_numbers(val)) refine[l - 1].push_back(static_cast<int>(v));
      } else if (kind == "alpha_own") {
        need(1);
        out.allocation.src_own(idx[0]) = std::stod(val);
      } else if (kind == "alpha_src") {
        need(2);
        out.allocation.src_support(idx[0], idx[1]) = std::stod(val);
      } else if (kind == "alpha_relay") {
        need(3);
        out.allocation.relay(idx[0], idx[1], idx[2]) = std::stod(val);
      } else if (kind == "beta") {
        need(2);
        out.allocation.bcast(idx[0], idx[1]) = std::stod(val);
      } else if (kind == "nq") {
        need(2);
        out.allocation.noise(idx[0], idx[1]) = std::stod(val);
      } else {
        throw std::invalid_argument("alloc: unknown entry '" + kind + "'");
      }
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("alloc: index out of range on line " + std::to_string(lineno));
    }
  }
  out.ordering = Ordering(levels, refine);
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) return {std::stod(spec)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("grid: expected a:b:n");
  const double a = std::stod(spec.substr(0, c1));
  const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const int n = std::stoi(spec.substr(c2 + 1));
  if (n < 2) throw std::invalid_argument("grid: need at least two points");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace relaynet
