#include "hyra/mip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hyra/channel.hpp"
#include "hyra/rng.hpp"

namespace hyra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string idx3(const char* stem, int i, int k, int t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%d_%d_%d", stem, i, k, t);
  return buf;
}

std::string idx2(const char* stem, int k, int t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%d_%d", stem, k, t);
  return buf;
}

std::string idx1(const char* stem, int s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%d", stem, s);
  return buf;
}

class ModelBuilder {
 public:
  ModelBuilder(MipModel& model) : model_(model) {}

  int add_var(std::string name, double lo, double hi, bool binary = false) {
    const int id = static_cast<int>(model_.vars.size());
    model_.index.emplace(name, id);
    model_.vars.push_back({std::move(name), lo, hi, binary});
    return id;
  }

  MipRow& add_row(std::string name, std::string family, RowSense sense,
                  double rhs) {
    model_.rows.push_back({std::move(name), std::move(family), {}, sense, rhs});
    return model_.rows.back();
  }

 private:
  MipModel& model_;
};

}  // namespace

const char* to_string(FormulationKind k) {
  switch (k) {
    case FormulationKind::hyra:
      return "hyra";
    case FormulationKind::dedicated_only:
      return "dedicated_only";
    case FormulationKind::shared_only:
      return "shared_only";
  }
  return "?";
}

FormulationKind formulation_from_string(const std::string& name) {
  if (name == "hyra") return FormulationKind::hyra;
  if (name == "dedicated_only" || name == "dedicated")
    return FormulationKind::dedicated_only;
  if (name == "shared_only" || name == "shared")
    return FormulationKind::shared_only;
  throw std::invalid_argument("unknown formulation kind: " + name);
}

int MipModel::var(const std::string& name) const {
  const auto it = index.find(name);
  if (it == index.end())
    throw std::invalid_argument("MipModel: unknown variable " + name);
  return it->second;
}

std::size_t MipModel::binary_count() const {
  std::size_t n = 0;
  for (const auto& v : vars) n += v.binary ? 1 : 0;
  return n;
}

std::size_t MipModel::continuous_count() const {
  return vars.size() - binary_count();
}

double default_big_m(double eta_max, double x_upper, double epsilon) {
  return 10.0 * std::max(x_upper, 1.0 + eta_max * (x_upper + 1.0 / epsilon));
}

MipModel build_mip(const SampleSet& samples, const SlaSpec& sla,
                   const MipBuildParams& params) {
  samples.validate();
  sla.validate(samples.n_slices, samples.n_ues);
  if (!(params.epsilon > 0.0))
    throw std::invalid_argument("build_mip: epsilon must be positive");
  if (params.big_m != 0.0 && !(params.big_m > 0.0))
    throw std::invalid_argument("build_mip: big_m must be positive");
  if (!(params.x_upper > 0.0))
    throw std::invalid_argument("build_mip: x_upper must be positive");

  const int S = samples.n_slices;
  const int n = samples.n_ues;
  const int K = samples.samples;
  const int T = samples.slots;
  const bool ded = params.kind != FormulationKind::shared_only;
  const bool sh = params.kind != FormulationKind::dedicated_only;

  double eta_max = 0.0;
  for (const double e : samples.eta) eta_max = std::max(eta_max, e);

  MipModel model;
  model.kind = params.kind;
  model.n_slices = S;
  model.n_ues = n;
  model.samples = K;
  model.slots = T;
  model.epsilon = params.epsilon;
  model.x_upper = params.x_upper;
  model.big_m = params.big_m > 0.0
                    ? params.big_m
                    : default_big_m(eta_max, params.x_upper, params.epsilon);
  const double M = model.big_m;

  ModelBuilder b(model);

  // ---- variables (allocation first; the objective reads nicely that way)
  std::vector<int> xded(S, -1);
  int xsh = -1;
  if (ded)
    for (int s = 0; s < S; ++s)
      xded[s] = b.add_var(idx1("xded", s), 0.0, params.x_upper);
  if (sh) xsh = b.add_var("xsh", 0.0, params.x_upper);

  auto grid3 = [&](const char* stem, double lo, double hi,
                   bool binary = false) {
    std::vector<int> ids(static_cast<std::size_t>(n) * K * T);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t)
          ids[(static_cast<std::size_t>(i) * K + k) * T + t] =
              b.add_var(idx3(stem, i, k, t), lo, hi, binary);
    return ids;
  };
  auto at3 = [&](const std::vector<int>& ids, int i, int k, int t) {
    return ids[(static_cast<std::size_t>(i) * K + k) * T + t];
  };

  std::vector<int> yded, ysh;
  if (ded) yded = grid3("yded", 0.0, kInf);
  if (sh) ysh = grid3("ysh", 0.0, kInf);
  const std::vector<int> srv = grid3("s", 0.0, kInf);

  // q_i_k_t for t = 0..T; the initial backlog is pinned to zero and the
  // final variable keeps the last recursion row well-posed.
  std::vector<int> q(static_cast<std::size_t>(n) * K * (T + 1));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t <= T; ++t)
        q[(static_cast<std::size_t>(i) * K + k) * (T + 1) + t] =
            b.add_var(idx3("q", i, k, t), 0.0, t == 0 ? 0.0 : kInf);
  auto qat = [&](int i, int k, int t) {
    return q[(static_cast<std::size_t>(i) * K + k) * (T + 1) + t];
  };

  std::vector<int> w;
  if (ded) {
    w.resize(static_cast<std::size_t>(S) * K * T);
    for (int s = 0; s < S; ++s)
      for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t)
          w[(static_cast<std::size_t>(s) * K + k) * T + t] =
              b.add_var(idx3("w", s, k, t), params.epsilon, kInf);
  }
  auto wat = [&](int s, int k, int t) {
    return w[(static_cast<std::size_t>(s) * K + k) * T + t];
  };

  std::vector<int> mu;
  if (sh) {
    mu.resize(static_cast<std::size_t>(K) * T);
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t)
        mu[static_cast<std::size_t>(k) * T + t] =
            b.add_var(idx2("mu", k, t), params.epsilon, kInf);
  }
  auto muat = [&](int k, int t) {
    return mu[static_cast<std::size_t>(k) * T + t];
  };

  std::vector<int> zded, zsh;
  if (ded) zded = grid3("zded", 0.0, 1.0, true);
  if (sh) zsh = grid3("zsh", 0.0, 1.0, true);

  // ---- objective: minimize total allocated PRBs
  if (sh) model.objective.emplace_back(xsh, 1.0);
  if (ded)
    for (int s = 0; s < S; ++s) model.objective.emplace_back(xded[s], 1.0);

  // ---- capacity and queue recursion
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) {
        const double eta = samples.se(i, k, t);
        const double rate = kSymbolsPerPrb * eta;

        MipRow& cap = b.add_row(idx3("cap", i, k, t), "capacity",
                                RowSense::le, 0.0);
        cap.terms.emplace_back(at3(srv, i, k, t), 1.0);
        if (ded) cap.terms.emplace_back(at3(yded, i, k, t), -rate);
        if (sh) cap.terms.emplace_back(at3(ysh, i, k, t), -rate);

        MipRow& qr = b.add_row(idx3("qr", i, k, t), "queue", RowSense::le,
                               -samples.arrival(i, k, t));
        qr.terms.emplace_back(qat(i, k, t), 1.0);
        qr.terms.emplace_back(at3(srv, i, k, t), -1.0);
        qr.terms.emplace_back(qat(i, k, t + 1), -1.0);
      }

  // ---- SLA rows; sample terms with zero arrivals contribute delay 0 and
  // are dropped, mirroring the simulator's convention.
  std::vector<std::vector<double>> arrival_sum(
      n, std::vector<double>(K, 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) arrival_sum[i][k] += samples.arrival(i, k, t);

  if (sla.mode == SlaSpec::Mode::per_ue) {
    for (int i = 0; i < n; ++i) {
      bool any = false;
      for (int k = 0; k < K; ++k) any = any || arrival_sum[i][k] > 0.0;
      if (!any) continue;  // delay is identically zero
      const double budget = sla.ue_budget_ms.empty()
                                ? sla.slice_budget_ms[samples.slice_of[i]]
                                : sla.ue_budget_ms[i];
      MipRow& row = b.add_row(idx1("sla", i), "sla", RowSense::le, budget);
      for (int k = 0; k < K; ++k) {
        if (!(arrival_sum[i][k] > 0.0)) continue;
        const double coef = 1.0 / (K * arrival_sum[i][k]);
        for (int t = 1; t <= T; ++t)
          row.terms.emplace_back(qat(i, k, t), coef);
      }
    }
  } else {
    for (int s = 0; s < S; ++s) {
      const auto ues = samples.ues_of_slice(s);
      bool any = false;
      for (const int i : ues)
        for (int k = 0; k < K; ++k) any = any || arrival_sum[i][k] > 0.0;
      if (!any || ues.empty()) continue;
      MipRow& row = b.add_row(idx1("sla", s), "sla", RowSense::le,
                              sla.slice_budget_ms[s]);
      for (const int i : ues)
        for (int k = 0; k < K; ++k) {
          if (!(arrival_sum[i][k] > 0.0)) continue;
          const double coef = 1.0 / (static_cast<double>(ues.size()) * K *
                                     arrival_sum[i][k]);
          for (int t = 1; t <= T; ++t)
            row.terms.emplace_back(qat(i, k, t), coef);
        }
    }
  }

  // ---- budget equalities
  if (ded)
    for (int s = 0; s < S; ++s) {
      const auto ues = samples.ues_of_slice(s);
      for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) {
          MipRow& row =
              b.add_row(idx3("bd", s, k, t), "budget", RowSense::eq, 0.0);
          for (const int i : ues) row.terms.emplace_back(at3(yded, i, k, t), 1.0);
          row.terms.emplace_back(xded[s], -1.0);
        }
    }
  if (sh)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) {
        MipRow& row = b.add_row(idx2("bs", k, t), "budget", RowSense::eq, 0.0);
        for (int i = 0; i < n; ++i) row.terms.emplace_back(at3(ysh, i, k, t), 1.0);
        row.terms.emplace_back(xsh, -1.0);
      }

  // ---- stationarity lower bounds and Big-M activation triples
  for (int i = 0; i < n; ++i) {
    const int s = samples.slice_of[i];
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) {
        const double eta = samples.se(i, k, t);

        // eta (y_total - level) >= -1, for each pool's reciprocal level
        if (ded) {
          MipRow& row =
              b.add_row(idx3("sd", i, k, t), "stationarity", RowSense::ge, -1.0);
          row.terms.emplace_back(at3(yded, i, k, t), eta);
          if (sh) row.terms.emplace_back(at3(ysh, i, k, t), eta);
          row.terms.emplace_back(wat(s, k, t), -eta);
        }
        if (sh) {
          MipRow& row =
              b.add_row(idx3("ss", i, k, t), "stationarity", RowSense::ge, -1.0);
          if (ded) row.terms.emplace_back(at3(yded, i, k, t), eta);
          row.terms.emplace_back(at3(ysh, i, k, t), eta);
          row.terms.emplace_back(muat(k, t), -eta);
        }

        // Activation: z = 1 forces the stationarity bound to equality,
        // z = 0 forces y to zero.
        if (ded) {
          const int z = at3(zded, i, k, t);
          MipRow& r1 =
              b.add_row(idx3("bmd1", i, k, t), "bigm", RowSense::le, 0.0);
          r1.terms.emplace_back(at3(yded, i, k, t), 1.0);
          r1.terms.emplace_back(z, -M);

          MipRow& r2 =
              b.add_row(idx3("bmd2", i, k, t), "bigm", RowSense::le, M - 1.0);
          r2.terms.emplace_back(at3(yded, i, k, t), eta);
          if (sh) r2.terms.emplace_back(at3(ysh, i, k, t), eta);
          r2.terms.emplace_back(wat(s, k, t), -eta);
          r2.terms.emplace_back(z, M);

          MipRow& r3 =
              b.add_row(idx3("bmd3", i, k, t), "bigm", RowSense::le, M + 1.0);
          r3.terms.emplace_back(at3(yded, i, k, t), -eta);
          if (sh) r3.terms.emplace_back(at3(ysh, i, k, t), -eta);
          r3.terms.emplace_back(wat(s, k, t), eta);
          r3.terms.emplace_back(z, M);
        }
        if (sh) {
          const int z = at3(zsh, i, k, t);
          MipRow& r1 =
              b.add_row(idx3("bms1", i, k, t), "bigm", RowSense::le, 0.0);
          r1.terms.emplace_back(at3(ysh, i, k, t), 1.0);
          r1.terms.emplace_back(z, -M);

          MipRow& r2 =
              b.add_row(idx3("bms2", i, k, t), "bigm", RowSense::le, M - 1.0);
          if (ded) r2.terms.emplace_back(at3(yded, i, k, t), eta);
          r2.terms.emplace_back(at3(ysh, i, k, t), eta);
          r2.terms.emplace_back(muat(k, t), -eta);
          r2.terms.emplace_back(z, M);

          MipRow& r3 =
              b.add_row(idx3("bms3", i, k, t), "bigm", RowSense::le, M + 1.0);
          if (ded) r3.terms.emplace_back(at3(yded, i, k, t), -eta);
          r3.terms.emplace_back(at3(ysh, i, k, t), -eta);
          r3.terms.emplace_back(muat(k, t), eta);
          r3.terms.emplace_back(z, M);
        }
      }
  }

  return model;
}

namespace {

void format_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_terms(std::ostream& os, const MipModel& model,
                  const std::vector<std::pair<int, double>>& terms,
                  std::string& line) {
  bool first = true;
  for (const auto& [id, coef] : terms) {
    line += ' ';
    if (coef < 0.0) {
      line += "- ";
    } else if (!first) {
      line += "+ ";
    }
    const double mag = std::abs(coef);
    if (mag != 1.0) {
      format_number(line, mag);
      line += ' ';
    }
    line += model.vars[id].name;
    first = false;
    if (line.size() > 200) {
      os << line << '\n';
      line = "   ";
    }
  }
}

}  // namespace

void export_lp(const MipModel& model, std::ostream& os) {
  os << "\\ " << to_string(model.kind) << " formulation: " << model.n_slices
     << " slices, " << model.n_ues << " ues, K=" << model.samples
     << ", T=" << model.slots << "\n";
  os << "\\ big_m=";
  {
    std::string s;
    format_number(s, model.big_m);
    s += ", epsilon=";
    format_number(s, model.epsilon);
    os << s << "\n";
  }
  os << "Minimize\n";
  {
    std::string line = " obj:";
    append_terms(os, model, model.objective, line);
    os << line << '\n';
  }
  os << "Subject To\n";
  for (const auto& row : model.rows) {
    std::string line = " " + row.name + ":";
    append_terms(os, model, row.terms, line);
    line += row.sense == RowSense::le   ? " <= "
            : row.sense == RowSense::ge ? " >= "
                                        : " = ";
    format_number(line, row.rhs);
    os << line << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.binary) continue;  // binaries are bounded by their section
    std::string line = " ";
    if (v.lo == v.hi) {
      line += v.name + " = ";
      format_number(line, v.lo);
    } else if (v.hi == kInf) {
      if (v.lo == 0.0) continue;  // LP default bound
      line += v.name + " >= ";
      format_number(line, v.lo);
    } else {
      format_number(line, v.lo);
      line += " <= " + v.name + " <= ";
      format_number(line, v.hi);
    }
    os << line << '\n';
  }
  os << "Binaries\n";
  {
    std::string line;
    for (const auto& v : model.vars) {
      if (!v.binary) continue;
      if (line.size() + v.name.size() > 200) {
        os << line << '\n';
        line.clear();
      }
      line += ' ';
      line += v.name;
    }
    if (!line.empty()) os << line << '\n';
  }
  os << "End\n";
}

void export_lp_file(const MipModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open LP output file: " + path);
  export_lp(model, os);
  if (!os) throw std::runtime_error("failed writing LP file: " + path);
}

LpCounts parse_lp_counts(std::istream& is) {
  enum class Section { preamble, objective, rows, bounds, binaries, done };
  Section section = Section::preamble;
  std::set<std::string> names;
  std::set<std::string> binaries;
  std::size_t constraints = 0;

  auto scan_names = [&](const std::string& text) {
    std::size_t i = 0;
    while (i < text.size()) {
      if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
        std::size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) ||
                text[j] == '_'))
          ++j;
        std::string token = text.substr(i, j - i);
        // exponent suffixes of numbers never start a token here because the
        // digit test above would have consumed them
        if (token != "obj") names.insert(token);
        i = j;
      } else {
        ++i;
      }
    }
  };

  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '\\') continue;
    std::string lower;
    for (const char c : line)
      lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.rfind("minimize", 0) == 0) {
      section = Section::objective;
      continue;
    }
    if (lower.rfind("subject to", 0) == 0) {
      section = Section::rows;
      continue;
    }
    if (lower.rfind("bounds", 0) == 0) {
      section = Section::bounds;
      continue;
    }
    if (lower.rfind("binaries", 0) == 0 || lower.rfind("binary", 0) == 0) {
      section = Section::binaries;
      continue;
    }
    if (lower.rfind("end", 0) == 0) {
      section = Section::done;
      break;
    }

    const auto colon = line.find(':');
    std::string body = line;
    if (section == Section::rows && colon != std::string::npos) {
      ++constraints;
      body = line.substr(colon + 1);
    } else if (section == Section::objective && colon != std::string::npos) {
      body = line.substr(colon + 1);
    }
    if (section == Section::binaries) {
      std::istringstream row(body);
      std::string name;
      while (row >> name) {
        binaries.insert(name);
        names.insert(name);
      }
    } else if (section != Section::preamble) {
      scan_names(body);
    }
  }

  LpCounts counts;
  counts.variables = names.size();
  counts.binaries = binaries.size();
  counts.constraints = constraints;
  return counts;
}

LpCounts parse_lp_counts_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open LP file: " + path);
  return parse_lp_counts(is);
}

double ViolationReport::family(const std::string& name) const {
  const auto it = by_family.find(name);
  return it == by_family.end() ? 0.0 : it->second;
}

ViolationReport check_solution(const MipModel& model, const Assignment& point,
                               double binary_tol) {
  std::vector<double> value(model.vars.size());
  for (std::size_t id = 0; id < model.vars.size(); ++id) {
    const auto it = point.find(model.vars[id].name);
    if (it == point.end())
      throw std::invalid_argument("check_solution: missing variable " +
                                  model.vars[id].name);
    value[id] = it->second;
  }

  ViolationReport report;
  auto note = [&](const std::string& family, double violation,
                  const std::string& name) {
    double& slot = report.by_family[family];
    slot = std::max(slot, violation);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst = name;
    }
  };

  for (std::size_t id = 0; id < model.vars.size(); ++id) {
    const MipVar& v = model.vars[id];
    note("bounds",
         std::max(std::max(v.lo - value[id], value[id] - v.hi), 0.0), v.name);
    if (v.binary)
      note("binary", std::abs(value[id] - std::round(value[id])), v.name);
  }

  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& [id, coef] : row.terms) lhs += coef * value[id];
    double violation = 0.0;
    switch (row.sense) {
      case RowSense::le:
        violation = std::max(lhs - row.rhs, 0.0);
        break;
      case RowSense::ge:
        violation = std::max(row.rhs - lhs, 0.0);
        break;
      case RowSense::eq:
        violation = std::abs(lhs - row.rhs);
        break;
    }
    note(row.family, violation, row.name);
  }
  (void)binary_tol;
  return report;
}

double big_m_headroom(const MipModel& model, const Assignment& point) {
  std::vector<double> value(model.vars.size());
  for (std::size_t id = 0; id < model.vars.size(); ++id)
    value[id] = point.at(model.vars[id].name);
  double worst = 0.0;
  for (const auto& row : model.rows) {
    if (row.family != "bigm") continue;
    // measure |lhs without the M z term| against M
    double lhs = 0.0;
    for (const auto& [id, coef] : row.terms) {
      if (model.vars[id].binary) continue;
      lhs += coef * value[id];
    }
    worst = std::max(worst, std::abs(lhs) / model.big_m);
  }
  return worst;
}

Assignment lift_assignment(const MipModel& model, const SampleSet& samples,
                           const Allocation& alloc) {
  if (samples.n_ues != model.n_ues || samples.samples != model.samples ||
      samples.slots != model.slots || samples.n_slices != model.n_slices)
    throw std::invalid_argument("lift_assignment: sample/model dims disagree");
  const bool ded = model.kind != FormulationKind::shared_only;
  const bool sh = model.kind != FormulationKind::dedicated_only;

  Allocation effective = alloc;
  if (!ded) std::fill(effective.x_ded.begin(), effective.x_ded.end(), 0.0);
  if (!sh) effective.x_sh = 0.0;

  const SimResult sim = simulate(effective, samples);

  Assignment a;
  a.reserve(model.vars.size());
  if (ded)
    for (int s = 0; s < model.n_slices; ++s)
      a[idx1("xded", s)] = effective.x_ded[s];
  if (sh) a["xsh"] = effective.x_sh;

  SlotSolver solver(samples.slice_of, samples.n_slices);
  SlotSchedule schedule;
  for (int k = 0; k < model.samples; ++k)
    for (int t = 0; t < model.slots; ++t) {
      solver.solve(effective, samples.eta_at(k, t), schedule);
      for (int i = 0; i < model.n_ues; ++i) {
        if (ded) {
          a[idx3("yded", i, k, t)] = schedule.y_ded[i];
          a[idx3("zded", i, k, t)] = schedule.y_ded[i] > 0.0 ? 1.0 : 0.0;
        }
        if (sh) {
          a[idx3("ysh", i, k, t)] = schedule.y_sh[i];
          a[idx3("zsh", i, k, t)] = schedule.y_sh[i] > 0.0 ? 1.0 : 0.0;
        }
        a[idx3("s", i, k, t)] = sim.queues.served[sim.queues.idx(i, k, t)];
        a[idx3("q", i, k, t + 1)] =
            sim.queues.backlog[sim.queues.idx(i, k, t)];
      }
      if (ded)
        for (int s = 0; s < model.n_slices; ++s)
          a[idx3("w", s, k, t)] = 1.0 / schedule.lambda[s];
      if (sh) a[idx2("mu", k, t)] = 1.0 / schedule.nu;
    }
  for (int i = 0; i < model.n_ues; ++i)
    for (int k = 0; k < model.samples; ++k) a[idx3("q", i, k, 0)] = 0.0;
  return a;
}

// ---- transform equivalence -------------------------------------------------

namespace {

struct MultiplierPoint {
  std::vector<double> y_ded;
  std::vector<double> lambda;  // per slice
  std::vector<double> gamma;   // per UE
};

// Water-fill the dedicated stage for fixed shared allocations; the result is
// a member of the multiplier set by construction.
MultiplierPoint waterfill_multiplier_point(const TransformInstance& inst) {
  const std::size_t n = inst.etas.size();
  MultiplierPoint p;
  p.y_ded.assign(n, 0.0);
  p.lambda.assign(inst.n_slices, 0.0);
  p.gamma.assign(n, 0.0);

  std::vector<double> floors(n);
  for (std::size_t i = 0; i < n; ++i)
    floors[i] = 1.0 / inst.etas[i] + inst.y_sh[i];

  for (int s = 0; s < inst.n_slices; ++s) {
    std::vector<double> slice_floors;
    std::vector<std::size_t> ues;
    for (std::size_t i = 0; i < n; ++i)
      if (inst.slice_of[i] == s) {
        ues.push_back(i);
        slice_floors.push_back(floors[i]);
      }
    if (inst.x_ded[s] > 0.0) {
      const double h = solve_water_height(slice_floors, inst.x_ded[s]);
      for (std::size_t j = 0; j < ues.size(); ++j)
        p.y_ded[ues[j]] = std::max(h - slice_floors[j], 0.0);
      p.lambda[s] = 1.0 / h;
    } else {
      // any multiplier at or above the largest marginal keeps gamma >= 0
      double max_marginal = 0.0;
      for (const double f : slice_floors)
        max_marginal = std::max(max_marginal, 1.0 / f);
      p.lambda[s] = max_marginal;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double marginal = 1.0 / (floors[i] + p.y_ded[i]);
    p.gamma[i] = p.lambda[inst.slice_of[i]] - marginal;
  }
  return p;
}

}  // namespace

double reciprocal_set_violation(const TransformInstance& inst,
                                std::span<const double> y_ded,
                                std::span<const double> w) {
  double v = 0.0;
  std::vector<double> used(inst.n_slices, 0.0);
  for (std::size_t i = 0; i < inst.etas.size(); ++i) {
    const int s = inst.slice_of[i];
    const double expr =
        1.0 + inst.etas[i] * (y_ded[i] + inst.y_sh[i] - w[s]);
    v = std::max(v, -expr);                        // eta (y - w) >= -1
    v = std::max(v, std::abs(y_ded[i] * expr));    // complementarity
    v = std::max(v, -y_ded[i]);                    // y >= 0
    used[s] += y_ded[i];
  }
  for (int s = 0; s < inst.n_slices; ++s) {
    v = std::max(v, std::abs(used[s] - inst.x_ded[s]));  // budget equality
    if (!(w[s] > 0.0)) v = std::max(v, 1.0);             // strict positivity
  }
  return v;
}

double multiplier_set_violation(const TransformInstance& inst,
                                std::span<const double> y_ded,
                                std::span<const double> lambda,
                                std::span<const double> gamma) {
  double v = 0.0;
  std::vector<double> used(inst.n_slices, 0.0);
  for (std::size_t i = 0; i < inst.etas.size(); ++i) {
    const int s = inst.slice_of[i];
    const double marginal =
        inst.etas[i] / (1.0 + inst.etas[i] * (y_ded[i] + inst.y_sh[i]));
    v = std::max(v, std::abs(marginal - (lambda[s] - gamma[i])));
    v = std::max(v, std::abs(gamma[i] * y_ded[i]));
    v = std::max(v, -gamma[i]);
    v = std::max(v, -y_ded[i]);
    used[s] += y_ded[i];
  }
  for (int s = 0; s < inst.n_slices; ++s) {
    v = std::max(v, used[s] - inst.x_ded[s]);  // budget <=
    v = std::max(v, std::abs(lambda[s] * (inst.x_ded[s] - used[s])));
  }
  return v;
}

double check_transform_forward(const TransformInstance& inst) {
  const MultiplierPoint p = waterfill_multiplier_point(inst);
  // sanity: the sampled point must itself be a member
  double v = multiplier_set_violation(inst, p.y_ded, p.lambda, p.gamma);
  std::vector<double> w(inst.n_slices);
  for (int s = 0; s < inst.n_slices; ++s) w[s] = 1.0 / p.lambda[s];
  return std::max(v, reciprocal_set_violation(inst, p.y_ded, w));
}

double check_transform_backward(const TransformInstance& inst,
                                double water_height) {
  const std::size_t n = inst.etas.size();
  std::vector<double> floors(n);
  for (std::size_t i = 0; i < n; ++i)
    floors[i] = 1.0 / inst.etas[i] + inst.y_sh[i];

  // Build a reciprocal-set member: per slice, every UE whose floor is under
  // the height is topped up to it; the budget is whatever that consumes.
  TransformInstance local = inst;
  std::vector<double> y_ded(n, 0.0), w(inst.n_slices, water_height);
  local.x_ded.assign(inst.n_slices, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y_ded[i] = std::max(water_height - floors[i], 0.0);
    local.x_ded[inst.slice_of[i]] += y_ded[i];
  }
  double v = reciprocal_set_violation(local, y_ded, w);

  std::vector<double> lambda(inst.n_slices, 1.0 / water_height);
  std::vector<double> gamma(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double marginal =
        inst.etas[i] / (1.0 + inst.etas[i] * (y_ded[i] + inst.y_sh[i]));
    gamma[i] = lambda[inst.slice_of[i]] - marginal;
  }
  return std::max(v, multiplier_set_violation(local, y_ded, lambda, gamma));
}

TransformCheckReport verify_transform_equivalence(
    const TransformCheckConfig& config) {
  TransformCheckReport report;
  Xoshiro256pp rng(derive_seed(config.seed, 0x7E, 0, 0));

  for (int trial = 0; trial < config.trials; ++trial) {
    TransformInstance inst;
    inst.n_slices =
        1 + static_cast<int>(rng.uniform01() * config.max_slices) %
                std::max(config.max_slices, 1);
    for (int s = 0; s < inst.n_slices; ++s) {
      const int ues =
          1 + static_cast<int>(rng.uniform01() * config.max_ues_per_slice) %
                  std::max(config.max_ues_per_slice, 1);
      for (int j = 0; j < ues; ++j) {
        inst.etas.push_back(0.1 + rng.uniform01() * 7.3);
        inst.slice_of.push_back(s);
        inst.y_sh.push_back(rng.uniform01() < 0.3 ? 0.0
                                                  : rng.uniform01() * 2.0);
      }
      inst.x_ded.push_back(rng.uniform01() < 0.25 ? 0.0
                                                  : rng.uniform01() * 20.0);
    }

    double v = check_transform_forward(inst);
    double min_floor = kInf, max_floor = 0.0;
    for (std::size_t i = 0; i < inst.etas.size(); ++i) {
      const double f = 1.0 / inst.etas[i] + inst.y_sh[i];
      min_floor = std::min(min_floor, f);
      max_floor = std::max(max_floor, f);
    }
    const double height =
        0.5 * min_floor + rng.uniform01() * (max_floor + 2.0 - 0.5 * min_floor);
    v = std::max(v, check_transform_backward(inst, height));

    report.max_violation = std::max(report.max_violation, v);
    if (v > config.tol) ++report.failures;
    ++report.trials;
  }
  return report;
}

}  // namespace hyra
