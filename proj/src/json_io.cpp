#include "dephasim/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace dephasim {

using nlohmann::json;

namespace {

std::string idx(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigParseError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigParseError(path + "." + key + ": missing");
  return *it;
}

double as_num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigParseError(path + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigParseError(path + ": expected an integer");
  return j.get<int>();
}

std::vector<double> real_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigParseError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(as_num(j[i], idx(path, i)));
  return out;
}

Complex entry_complex(const json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(as_num(j[0], idx(path, 0)), as_num(j[1], idx(path, 1)));
  throw ConfigParseError(path + ": expected [re, im]");
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(path.string() + ": " + e.what());
  }
}

ModelSpec model_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigParseError(path + ": expected an object");
  const bool has_ring = j.contains("ring");
  if (has_ring && j.contains("gamma"))
    throw ConfigParseError(path + ": give either ring or gamma, not both");

  ModelSpec m;
  if (has_ring) {
    const json& r = j["ring"];
    const std::string rp = path + ".ring";
    RingCouplingParams p;
    p.n = as_int(member(r, "n", rp), rp + ".n");
    if (p.n < 2) throw ConfigParseError(rp + ".n: need at least two qubits");
    p.gamma = as_num(member(r, "gamma", rp), rp + ".gamma");
    p.chi = as_num(member(r, "chi", rp), rp + ".chi");
    p.lambda = r.contains("lambda") ? as_num(r["lambda"], rp + ".lambda") : p.n / 4.0;
    m = ring_model(p);
    if (j.contains("subsystems"))
      throw ConfigParseError(path + ".subsystems: fixed to qubits by ring shorthand");
  } else {
    const json& subs = member(j, "subsystems", path);
    if (!subs.is_array() || subs.empty())
      throw ConfigParseError(path + ".subsystems: expected a non-empty array");
    for (size_t i = 0; i < subs.size(); ++i)
      m.subsystems.push_back(real_vector(subs[i], idx(path + ".subsystems", i)));
    const int n = m.subsystem_count();

    const json& g = member(j, "gamma", path);
    if (!g.is_array() || static_cast<int>(g.size()) != n)
      throw ConfigParseError(path + ".gamma: expected " + std::to_string(n) + " rows");
    m.gamma = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const std::string rp = idx(path + ".gamma", r);
      if (!g[r].is_array() || static_cast<int>(g[r].size()) != n)
        throw ConfigParseError(rp + ": expected " + std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c) m.gamma(r, c) = entry_complex(g[r][c], idx(rp, c));
    }
  }

  const int n = m.subsystem_count();
  if (j.contains("h")) {
    const json& h = j["h"];
    if (!h.is_array() || static_cast<int>(h.size()) != n)
      throw ConfigParseError(path + ".h: expected " + std::to_string(n) + " rows");
    m.h = RealMatrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const std::string rp = idx(path + ".h", r);
      if (!h[r].is_array() || static_cast<int>(h[r].size()) != n)
        throw ConfigParseError(rp + ": expected " + std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c) m.h(r, c) = as_num(h[r][c], idx(rp, c));
    }
  } else {
    m.h = RealMatrix::Zero(n, n);
  }

  try {
    return validate_model(m);
  } catch (const ValidationError& e) {
    throw ConfigParseError(path + ": " + e.what());
  }
}

SplitSpec split_from_json(const json& j, const std::string& path) {
  SplitSpec sp;
  for (const char* key : {"system", "bath"}) {
    const json& arr = member(j, key, path);
    const std::string kp = path + "." + key;
    if (!arr.is_array()) throw ConfigParseError(kp + ": expected an array");
    auto& dst = (std::string(key) == "system") ? sp.system : sp.bath;
    for (size_t i = 0; i < arr.size(); ++i) {
      const int one_based = as_int(arr[i], idx(kp, i));
      if (one_based < 1)
        throw ConfigParseError(idx(kp, i) + ": subsystem labels are 1-based");
      dst.push_back(one_based - 1);
    }
  }
  return sp;
}

EnvPopulations env_from_json(const json& j, const std::string& path) {
  EnvPopulations env;
  const bool has_full = j.is_object() && j.contains("full");
  const bool has_product = j.is_object() && j.contains("product");
  if (has_full == has_product)
    throw ConfigParseError(path + ": give exactly one of full or product");
  if (has_full) {
    env.full = real_vector(j["full"], path + ".full");
  } else {
    const json& pr = j["product"];
    const std::string pp = path + ".product";
    if (!pr.is_array()) throw ConfigParseError(pp + ": expected an array");
    env.product.emplace();
    for (size_t i = 0; i < pr.size(); ++i)
      env.product->push_back(real_vector(pr[i], idx(pp, i)));
  }
  return env;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigParseError(path + ": expected a non-empty array of rows");
  const size_t rows = j.size();
  Matrix out;
  for (size_t r = 0; r < rows; ++r) {
    const std::string rp = idx(path, r);
    if (!j[r].is_array() || j[r].size() != rows)
      throw ConfigParseError(rp + ": expected " + std::to_string(rows) + " entries");
    if (r == 0) out = Matrix::Zero(rows, rows);
    for (size_t c = 0; c < rows; ++c)
      out(r, c) = entry_complex(j[r][c], idx(rp, c));
  }
  return out;
}

json matrix_to_json(const Matrix& mat) {
  json rows = json::array();
  for (long r = 0; r < mat.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < mat.cols(); ++c)
      row.push_back({mat(r, c).real(), mat(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<MeasurementOperator> stage_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigParseError(path + ": expected a non-empty array of operators");
  std::vector<MeasurementOperator> stage;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string op_path = idx(path, i);
    MeasurementOperator mo;
    mo.op = matrix_from_json(member(j[i], "op", op_path), op_path + ".op");
    mo.value = as_num(member(j[i], "value", op_path), op_path + ".value");
    mo.label = j[i].contains("label") ? j[i]["label"].get<std::string>()
                                      : fmt_g17(mo.value);
    stage.push_back(std::move(mo));
  }
  return stage;
}

}  // namespace

MeasurementScheme scheme_from_json(const json& j, long sys_dim,
                                   const std::string& path) {
  if (!j.is_object()) throw ConfigParseError(path + ": expected an object");
  if (j.contains("first") && j["first"].is_string()) {
    if (j["first"] != "x" || member(j, "last", path) != "x")
      throw ConfigParseError(path + ": only the x/plane-angle/x builder is named");
    const json& mid = member(j, "intermediate", path);
    const double phi =
        as_num(member(mid, "plane_angle", path + ".intermediate"),
               path + ".intermediate.plane_angle");
    if (sys_dim != 2)
      throw ConfigParseError(path + ": named scheme needs a two-level system block");
    return xnx_scheme(phi);
  }
  MeasurementScheme sch;
  sch.first = stage_from_json(member(j, "first", path), path + ".first");
  sch.intermediate =
      stage_from_json(member(j, "intermediate", path), path + ".intermediate");
  sch.last = stage_from_json(member(j, "last", path), path + ".last");
  try {
    validate_scheme(sch, sys_dim);
  } catch (const ValidationError& e) {
    throw ConfigParseError(path + ": " + e.what());
  }
  return sch;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out;
  out.reserve(steps);
  for (int k = 0; k < steps; ++k)
    out.push_back(t_start + (t_end - t_start) * k / (steps - 1));
  return out;
}

TimeGrid grid_from_json(const json& j, const std::string& path) {
  TimeGrid g;
  g.t_start = as_num(member(j, "t_start", path), path + ".t_start");
  g.t_end = as_num(member(j, "t_end", path), path + ".t_end");
  g.steps = as_int(member(j, "steps", path), path + ".steps");
  if (g.steps < 2) throw ConfigParseError(path + ".steps: need at least 2");
  return g;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  cfg.raw = j;
  cfg.model = model_from_json(member(j, "model", "config"), "model");
  if (j.contains("split")) {
    cfg.split = split_from_json(j["split"], "split");
    try {
      cfg.split = validate_split(*cfg.split, cfg.model);
    } catch (const ValidationError& e) {
      throw ConfigParseError(std::string("split: ") + e.what());
    }
  }
  if (j.contains("env")) {
    if (!cfg.split) throw ConfigParseError("env: requires a split");
    cfg.env = env_from_json(j["env"], "env");
    try {
      cfg.env = validate_env(*cfg.env, cfg.model, *cfg.split);
    } catch (const ValidationError& e) {
      throw ConfigParseError(std::string("env: ") + e.what());
    }
  }
  if (j.contains("initial"))
    cfg.initial = matrix_from_json(j["initial"], "initial");
  if (j.contains("initial_system")) {
    if (!cfg.split) throw ConfigParseError("initial_system: requires a split");
    cfg.initial_system = matrix_from_json(j["initial_system"], "initial_system");
  }
  cfg.grid = grid_from_json(member(j, "grid", "config"), "grid");
  if (j.contains("tau_grid")) cfg.tau_grid = grid_from_json(j["tau_grid"], "tau_grid");
  if (j.contains("scheme")) {
    const long sys_dim = cfg.split
                             ? dims_product(system_dims(cfg.model, *cfg.split))
                             : cfg.model.total_dimension();
    cfg.scheme = scheme_from_json(j["scheme"], sys_dim, "scheme");
  }
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long long>();
  return cfg;
}

Matrix compose_initial(const ModelSpec& m, const SplitSpec& sp, const Matrix& rho_s,
                       const EnvPopulations& env) {
  const auto dims = m.dims();
  const auto sdims = system_dims(m, sp);
  const auto bdims = bath_dims(m, sp);
  const long d = dims_product(dims);
  const long ds = dims_product(sdims);
  if (rho_s.rows() != ds || rho_s.cols() != ds)
    throw DimensionMismatch("compose_initial: system state dimension mismatch");

  Matrix out = Matrix::Zero(d, d);
  for (long u = 0; u < d; ++u) {
    const auto up = unflatten_index(u, dims);
    std::vector<int> us(sp.system.size()), ub(sp.bath.size());
    for (size_t a = 0; a < sp.system.size(); ++a) us[a] = up[sp.system[a]];
    for (size_t a = 0; a < sp.bath.size(); ++a) ub[a] = up[sp.bath[a]];
    const double q = env_weight(env, ub, bdims);
    if (q == 0.0) continue;
    const long su = flat_index(us, sdims);
    for (long v = 0; v < d; ++v) {
      const auto vp = unflatten_index(v, dims);
      bool same_bath = true;
      for (size_t a = 0; a < sp.bath.size() && same_bath; ++a)
        same_bath = vp[sp.bath[a]] == ub[a];
      if (!same_bath) continue;
      std::vector<int> vs(sp.system.size());
      for (size_t a = 0; a < sp.system.size(); ++a) vs[a] = vp[sp.system[a]];
      out(u, v) = rho_s(su, flat_index(vs, sdims)) * q;
    }
  }
  return out;
}

std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const json& j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::string& comment,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << comment << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

}  // namespace dephasim
