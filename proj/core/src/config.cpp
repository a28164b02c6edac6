#include "otlab/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "otlab/numerics.hpp"

namespace otlab::cli {

namespace {

json base_defaults() {
  json j;
  j["seed"] = 42;
  j["jobs"] = 1;
  j["out"] = "";
  j["measure"] = {{"family", "gaussian"}, {"dim", 1}};
  j["target"] = {{"family", "uniform:-1:1"}, {"dim", 1}};
  j["body"] = {{"spec", "box:-1:1:-1:1"}};
  j["solver"] = {{"n", 2000},    {"m", 2000},         {"epsilon", 0.0},
                 {"tol", 1e-6},  {"dual_tol", 1e-8},  {"max_iter", 10000}};
  j["check"] = {{"alpha", 1.0}, {"p", 1.0}, {"q", 3.0}, {"slack", 1.15}};
  j["envelope"] = {{"p", 0.25}, {"a", 1.0}, {"nodes", 512}};
  j["concentrate"] = {{"samples", 1000000},
                      {"r", json::array({0.5, 1.0, 2.0, 4.0})}};
  return j;
}

const json* find_path(const json& j, const std::string& dotted) {
  const json* cur = &j;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const std::size_t dotp = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dotp == std::string::npos
                                                   ? std::string::npos
                                                   : dotp - pos);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
    if (dotp == std::string::npos) break;
    pos = dotp + 1;
  }
  return cur;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  c.data = base_defaults();
  c.data["command"] = command;
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& p,
                                             const std::string& command) {
  ExperimentConfig c = defaults(command);
  std::ifstream in(p);
  if (!in) throw std::runtime_error("config: cannot open " + p.string());
  json file;
  try {
    in >> file;
  } catch (const std::exception& e) {
    throw std::runtime_error("config: parse error in " + p.string() + ": " +
                             e.what());
  }
  c.data.merge_patch(file);
  c.data["command"] = command;
  return c;
}

void ExperimentConfig::override_path(const std::string& dotted,
                                     const std::string& value) {
  json* cur = &data;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t dotp = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dotp == std::string::npos
                                                   ? std::string::npos
                                                   : dotp - pos);
    if (key.empty())
      throw std::invalid_argument("config: empty key in --" + dotted);
    if (dotp == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (...) {
        parsed = value;  // plain string
      }
      (*cur)[key] = parsed;
      return;
    }
    cur = &(*cur)[key];
    pos = dotp + 1;
  }
}

std::string ExperimentConfig::canonical() const {
  // nlohmann::json keeps object keys sorted, so dump() is canonical
  return data.dump();
}

std::string ExperimentConfig::digest() const {
  return to_hex16(fnv1a64(canonical()));
}

double ExperimentConfig::num(const std::string& dotted, double fallback) const {
  const json* v = find_path(data, dotted);
  if (v == nullptr || !v->is_number()) return fallback;
  return v->get<double>();
}

std::string ExperimentConfig::str(const std::string& dotted,
                                  const std::string& fallback) const {
  const json* v = find_path(data, dotted);
  if (v == nullptr || !v->is_string()) return fallback;
  return v->get<std::string>();
}

std::uint64_t ExperimentConfig::seed() const {
  const json* v = find_path(data, "seed");
  if (v == nullptr || !v->is_number())
    throw std::invalid_argument("config: field 'seed' must be a number");
  return v->get<std::uint64_t>();
}

int ExperimentConfig::jobs() const {
  return static_cast<int>(num("jobs", 1));
}

std::string ExperimentConfig::out_dir() const {
  const std::string configured = str("out", "");
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("OTLAB_OUT")) return env;
  return "otlab-out";
}

measures::Potential parse_measure(const std::string& spec, int dim) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("measure: empty spec");
  const std::string& fam = parts[0];
  try {
    if (fam == "gaussian") {
      const double sigma = parts.size() > 1 ? std::stod(parts[1]) : 1.0;
      return measures::Potential::gaussian(dim, sigma);
    }
    if (fam == "powerlaw") {
      if (parts.size() < 2)
        throw std::invalid_argument("measure: powerlaw needs :beta");
      return measures::Potential::power_law(dim, std::stod(parts[1]));
    }
    if (fam == "huber") return measures::Potential::huber_product(dim);
    if (fam == "uniform") {
      if (parts.size() < 3)
        throw std::invalid_argument("measure: uniform needs :lo:hi");
      if (dim != 1)
        throw std::invalid_argument("measure: uniform:lo:hi is 1D");
      return measures::Potential::uniform_body(measures::ConvexBody::box(
          {std::stod(parts[1])}, {std::stod(parts[2])}));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("measure: bad parameters in '" + spec + "'");
  }
  throw std::invalid_argument("measure: unknown family '" + fam + "'");
}

measures::ConvexBody parse_body(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("body: empty spec");
  try {
    if (parts[0] == "box") {
      const std::size_t k = parts.size() - 1;
      if (k % 2 != 0 || k < 2 || k > 6)
        throw std::invalid_argument("body: box needs lo:hi per axis (d<=3)");
      Vec lo, hi;
      for (std::size_t i = 1; i < parts.size(); i += 2) {
        lo.push_back(std::stod(parts[i]));
        hi.push_back(std::stod(parts[i + 1]));
      }
      return measures::ConvexBody::box(lo, hi);
    }
    if (parts[0] == "ball") {
      if (parts.size() < 3 || parts.size() > 5)
        throw std::invalid_argument("body: ball needs center...:radius");
      Vec c;
      for (std::size_t i = 1; i + 1 < parts.size(); ++i)
        c.push_back(std::stod(parts[i]));
      return measures::ConvexBody::ball(c, std::stod(parts.back()));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("body: bad parameters in '" + spec + "'");
  }
  throw std::invalid_argument("body: unknown shape '" + parts[0] + "'");
}

void atomic_write(const std::filesystem::path& p, const std::string& content) {
  namespace fs = std::filesystem;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, p);
}

std::string artifact_header(const std::string& digest, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_digest=%s seed=%llu\n", digest.c_str(),
                static_cast<unsigned long long>(seed));
  return buf;
}

std::string svg_lineplot(const std::vector<double>& x,
                         const std::vector<std::vector<double>>& ys,
                         const std::string& title) {
  const int W = 720, H = 440, ML = 60, MR = 20, MT = 40, MB = 40;
  double xmin = x.front(), xmax = x.back();
  double ymin = 1e300, ymax = -1e300;
  for (const auto& y : ys)
    for (double v : y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;
  auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double v) { return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
    << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
    << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15'>"
    << title << "</text>\n";
  s << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='"
    << H - MB << "' stroke='black'/>\n";
  s << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='"
    << H - MB << "' stroke='black'/>\n";
  for (std::size_t k = 0; k < ys.size(); ++k) {
    s << "<polyline fill='none' stroke='" << colors[k % 4] << "' points='";
    for (std::size_t i = 0; i < x.size(); ++i)
      s << px(x[i]) << "," << py(ys[k][i]) << " ";
    s << "'/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace otlab::cli
