#include "secjam/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace secjam {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double to_double(const std::string& field) {
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) throw std::invalid_argument("bad number '" + field + "'");
  return v;
}

}  // namespace

SummaryRow summary_row(const Plan& plan, const Scenario& s, double wall_ms) {
  return {to_string(plan.scheme), s.horizon(), s.eve_uncertainty, plan.avg_rbar, plan.avg_rtilde,
          plan.outer_rounds, wall_ms};
}

std::string format_trajectory_csv(const Plan& plan) {
  std::ostringstream os;
  os << "slot,q1x,q1y,q2x,q2y,p1_w,p2_w,r0,re_ub,rbar,rtilde\n";
  const int n = plan.traj.num_slots();
  for (int k = 0; k <= n + 1; ++k) {
    const auto& q1 = plan.traj.tx[k];
    const auto& q2 = plan.traj.jam[k];
    os << k << ',' << num(q1.x()) << ',' << num(q1.y()) << ',' << num(q2.x()) << ',' << num(q2.y());
    if (k == 0 || k == n + 1) {
      os << ",,,,,,\n";
      continue;
    }
    const auto& r = plan.rates[k - 1];
    os << ',' << num(plan.power.tx[k - 1]) << ',' << num(plan.power.jam[k - 1]) << ',' << num(r.r0) << ','
       << num(r.re_ub) << ',' << num(r.rbar) << ',' << num(r.rtilde) << '\n';
  }
  return os.str();
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "scheme,horizon_s,eps_m,avg_rbar,avg_rtilde,outer_rounds,wall_ms\n";
  for (const auto& r : rows)
    os << r.scheme << ',' << num(r.horizon_s) << ',' << num(r.eps_m) << ',' << num(r.avg_rbar) << ','
       << num(r.avg_rtilde) << ',' << r.outer_rounds << ',' << num(r.wall_ms) << '\n';
  return os.str();
}

std::string format_convergence_csv(const Plan& plan) {
  std::ostringstream os;
  os << "round,phase,inner_iter,objective\n";
  for (const auto& e : plan.trace)
    os << e.round << ',' << to_string(e.phase) << ',' << e.inner_iter << ',' << num(e.objective) << '\n';
  return os.str();
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "sweep_param,value,scheme,status,horizon_s,eps_m,avg_rbar,avg_rtilde,outer_rounds,wall_ms,dir,message\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    os << r.param << ',' << num(r.value) << ',' << s.scheme << ',' << r.status << ',' << num(s.horizon_s) << ','
       << num(s.eps_m) << ',';
    if (r.status == "ok")
      os << num(s.avg_rbar) << ',' << num(s.avg_rtilde) << ',' << s.outer_rounds << ',' << num(s.wall_ms);
    else
      os << ",,,";
    os << ',' << quoted(r.dir) << ',' << quoted(r.message) << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void write_plan(const std::filesystem::path& dir, const Plan& plan, const Scenario& s, double wall_ms) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "trajectory.csv", format_trajectory_csv(plan));
  write_file_atomic(dir / "summary.csv", format_summary_csv({summary_row(plan, s, wall_ms)}));
  write_file_atomic(dir / "convergence.csv", format_convergence_csv(plan));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (in_quotes) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else if (c == '"') {
          in_quotes = false;
        } else {
          fields.back() += c;
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else {
        fields.back() += c;
      }
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path)); }

LoadedPlan load_trajectory_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto c1x = t.column("q1x"), c1y = t.column("q1y"), c2x = t.column("q2x"), c2y = t.column("q2y");
  const auto cp1 = t.column("p1_w"), cp2 = t.column("p2_w");
  LoadedPlan out;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    if (row.size() != t.header.size()) throw std::runtime_error("ragged row in '" + path.string() + "'");
    out.traj.tx.emplace_back(to_double(row[c1x]), to_double(row[c1y]));
    out.traj.jam.emplace_back(to_double(row[c2x]), to_double(row[c2y]));
    if (k != 0 && k + 1 != t.rows.size()) {
      out.power.tx.push_back(to_double(row[cp1]));
      out.power.jam.push_back(to_double(row[cp2]));
    }
  }
  return out;
}

}  // namespace secjam
