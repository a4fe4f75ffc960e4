#include "fputw/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fputw::io {

namespace {

using Kind = CheckpointError::Kind;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* left_name(Extension::Left l) {
  switch (l) {
    case Extension::Left::None:
      return "none";
    case Extension::Left::Even:
      return "even";
    case Extension::Left::Odd:
      return "odd";
    case Extension::Left::Affine:
      return "affine";
  }
  return "none";
}

const char* right_name(Extension::Right r) {
  switch (r) {
    case Extension::Right::None:
      return "none";
    case Extension::Right::Zero:
      return "zero";
    case Extension::Right::Periodic:
      return "periodic";
  }
  return "none";
}

class Writer {
 public:
  explicit Writer(ObjectKind kind) {
    out_ << "fputw-checkpoint " << kCheckpointVersion << '\n' << "kind " << to_string(kind) << '\n';
  }
  void scalar(const std::string& key, double v) { out_ << key << ' ' << num(v) << '\n'; }
  void integer(const std::string& key, long v) { out_ << key << ' ' << v << '\n'; }
  void word(const std::string& key, const std::string& v) { out_ << key << ' ' << v << '\n'; }
  void solution(const PiecewiseSolution& s) {
    const Mesh& m = s.mesh();
    out_ << "mesh " << num(m.length()) << ' ' << m.intervals() << ' ' << m.gauss() << '\n';
    out_ << "components " << s.components() << '\n';
    for (const auto& e : s.extensions())
      out_ << "extension " << left_name(e.left) << ' ' << right_name(e.right) << ' ' << num(e.period) << ' '
           << num(e.affine_scale) << ' ' << (e.tag.empty() ? "-" : e.tag) << '\n';
    out_ << "params " << s.params().size();
    for (double p : s.params()) out_ << ' ' << num(p);
    out_ << '\n' << "coefficients " << s.coefficient_count() << '\n';
    const int nb = s.coefficients_per_block();
    const auto c = s.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) out_ << num(c[i]) << ((i + 1) % nb == 0 ? '\n' : ' ');
  }
  std::string finish() {
    out_ << "end\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  ObjectKind header() {
    auto t = line();
    if (t.size() != 2 || t[0] != "fputw-checkpoint") corrupt("missing checkpoint header");
    const long v = to_long(t[1]);
    if (v != kCheckpointVersion)
      throw CheckpointError(Kind::VersionMismatch, "checkpoint version " + t[1] + " is not supported (expected " +
                                                       std::to_string(kCheckpointVersion) + ")");
    auto k = expect("kind", 1);
    for (ObjectKind o : {ObjectKind::Solution, ObjectKind::Monatomic, ObjectKind::Jost, ObjectKind::Periodic,
                         ObjectKind::Diatomic})
      if (to_string(o) == k[0]) return o;
    corrupt("unknown object kind " + k[0]);
  }

  std::vector<std::string> expect(const std::string& key, std::size_t count) {
    auto t = line();
    if (t.empty() || t[0] != key || t.size() != count + 1) corrupt("expected '" + key + "'");
    return {t.begin() + 1, t.end()};
  }
  double scalar(const std::string& key) { return to_double(expect(key, 1)[0]); }
  long integer(const std::string& key) { return to_long(expect(key, 1)[0]); }
  std::string word(const std::string& key) { return expect(key, 1)[0]; }

  PiecewiseSolution solution() {
    auto m = expect("mesh", 3);
    const double length = to_double(m[0]);
    const long intervals = to_long(m[1]), gauss = to_long(m[2]);
    if (!(length > 0.0) || intervals < 1 || gauss < 1 || gauss > 8) corrupt("invalid mesh");
    const long comps = integer("components");
    if (comps < 1 || comps > 64) corrupt("invalid component count");
    std::vector<Extension> ext;
    for (long c = 0; c < comps; ++c) {
      auto e = expect("extension", 5);
      Extension x = Extension::make(parse_left(e[0]), parse_right(e[1]));
      x.period = to_double(e[2]);
      x.affine_scale = to_double(e[3]);
      if (e[4] != "-") x.tag = e[4];
      ext.push_back(std::move(x));
    }
    auto p = line();
    if (p.size() < 2 || p[0] != "params" || p.size() != 2 + static_cast<std::size_t>(to_long(p[1])))
      corrupt("expected 'params'");
    std::vector<double> params;
    for (std::size_t i = 2; i < p.size(); ++i) params.push_back(to_double(p[i]));
    PiecewiseSolution s;
    try {
      s = PiecewiseSolution(Mesh(length, static_cast<int>(intervals), static_cast<int>(gauss)),
                            static_cast<int>(comps), std::move(ext), std::move(params));
    } catch (const ContractViolation& e) {
      corrupt(e.what());
    }
    const long count = integer("coefficients");
    if (count != static_cast<long>(s.coefficient_count())) corrupt("coefficient count does not match the mesh");
    auto dst = s.coefficients();
    std::size_t filled = 0;
    while (filled < dst.size()) {
      auto t = line();
      for (const auto& tok : t) {
        if (filled >= dst.size()) corrupt("too many coefficients");
        dst[filled++] = to_double(tok);
      }
    }
    return s;
  }

  void end() {
    auto t = line();
    if (t.size() != 1 || t[0] != "end") corrupt("missing end marker");
  }

  [[noreturn]] static void corrupt(const std::string& what) {
    throw CheckpointError(Kind::Corrupt, "corrupt checkpoint: " + what);
  }

 private:
  std::vector<std::string> line() {
    std::string l;
    if (!std::getline(in_, l)) corrupt("unexpected end of file");
    std::istringstream ls(l);
    std::vector<std::string> t;
    for (std::string w; ls >> w;) t.push_back(w);
    return t;
  }

  static double to_double(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) corrupt("bad number '" + s + "'");
    return v;
  }
  static long to_long(const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') corrupt("bad integer '" + s + "'");
    return v;
  }
  static Extension::Left parse_left(const std::string& s) {
    for (auto l : {Extension::Left::None, Extension::Left::Even, Extension::Left::Odd, Extension::Left::Affine})
      if (s == left_name(l)) return l;
    corrupt("bad extension rule " + s);
  }
  static Extension::Right parse_right(const std::string& s) {
    for (auto r : {Extension::Right::None, Extension::Right::Zero, Extension::Right::Periodic})
      if (s == right_name(r)) return r;
    corrupt("bad extension rule " + s);
  }

  std::istringstream in_;
};

void expect_kind(Reader& r, ObjectKind k) {
  const ObjectKind got = r.header();
  if (got != k) Reader::corrupt("expected a " + to_string(k) + " checkpoint, found " + to_string(got));
}

void write_report(Writer& w, const NewtonReport& rep) {
  w.integer("iterations", rep.iterations);
  w.scalar("residual", rep.residual);
}

NewtonReport read_report(Reader& r) {
  NewtonReport rep;
  rep.iterations = static_cast<int>(r.integer("iterations"));
  rep.residual = r.scalar("residual");
  return rep;
}

}  // namespace

std::string to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::Solution:
      return "solution";
    case ObjectKind::Monatomic:
      return "monatomic";
    case ObjectKind::Jost:
      return "jost";
    case ObjectKind::Periodic:
      return "periodic";
    case ObjectKind::Diatomic:
      return "diatomic";
  }
  return "?";
}

std::string to_text(const PiecewiseSolution& s) {
  Writer w(ObjectKind::Solution);
  w.solution(s);
  return w.finish();
}

std::string to_text(const monatomic::MonatomicWave& m) {
  Writer w(ObjectKind::Monatomic);
  w.scalar("kappa", m.kappa);
  w.scalar("sigma", m.sigma);
  w.integer("negative_profile", m.negative_profile ? 1 : 0);
  write_report(w, m.report);
  w.solution(m.phi);
  return w.finish();
}

std::string to_text(const monatomic::JostSolution& j) {
  Writer w(ObjectKind::Jost);
  w.scalar("kappa", j.kappa);
  w.scalar("omega", j.omega);
  w.scalar("theta", j.theta);
  w.scalar("beta", j.beta);
  write_report(w, j.report);
  w.solution(j.system);
  return w.finish();
}

std::string to_text(const diatomic::PeriodicRipple& r) {
  Writer w(ObjectKind::Periodic);
  w.scalar("sigma", r.scalars.sigma);
  w.scalar("mu", r.scalars.mu);
  w.scalar("beta_P", r.scalars.beta);
  w.scalar("omega_P", r.scalars.omega);
  w.scalar("alpha_P", r.alpha);
  w.scalar("orientation", r.orientation);
  w.integer("orientation_flip", r.orientation_flip ? 1 : 0);
  write_report(w, r.report);
  w.solution(r.p);
  return w.finish();
}

std::string to_text(const diatomic::DiatomicWave& d) {
  Writer w(ObjectKind::Diatomic);
  w.scalar("kappa", d.kappa);
  w.word("fixed", diatomic::to_string(d.fixed));
  w.scalar("sigma", d.scalars.sigma);
  w.scalar("mu", d.scalars.mu);
  w.scalar("beta_P", d.scalars.beta);
  w.scalar("omega_P", d.scalars.omega);
  w.scalar("alpha_P", d.alpha);
  w.word("class", diatomic::to_string(d.cls));
  w.integer("orientation_flip", d.orientation_flip ? 1 : 0);
  write_report(w, d.report);
  w.solution(d.system);
  return w.finish();
}

PiecewiseSolution solution_from_text(const std::string& text) {
  Reader r(text);
  expect_kind(r, ObjectKind::Solution);
  PiecewiseSolution s = r.solution();
  r.end();
  return s;
}

monatomic::MonatomicWave monatomic_from_text(const std::string& text) {
  Reader r(text);
  expect_kind(r, ObjectKind::Monatomic);
  monatomic::MonatomicWave m;
  m.kappa = r.scalar("kappa");
  m.sigma = r.scalar("sigma");
  m.negative_profile = r.integer("negative_profile") != 0;
  m.report = read_report(r);
  m.phi = r.solution();
  r.end();
  if (m.phi.components() != 2) Reader::corrupt("monatomic wave needs two components");
  return m;
}

monatomic::JostSolution jost_from_text(const std::string& text) {
  Reader r(text);
  expect_kind(r, ObjectKind::Jost);
  monatomic::JostSolution j;
  j.kappa = r.scalar("kappa");
  j.omega = r.scalar("omega");
  j.theta = r.scalar("theta");
  j.beta = r.scalar("beta");
  j.report = read_report(r);
  j.system = r.solution();
  r.end();
  if (j.system.components() != 4 || j.system.params().size() != 3)
    Reader::corrupt("Jost system needs four components and three parameters");
  if (!(j.kappa > 0.0)) Reader::corrupt("Jost system needs a positive kappa");
  // the affine rule of Upsilon is rebuilt from kappa; only the tags travel
  auto bound = monatomic::combined_extensions(j.kappa);
  auto& ext = j.system.extensions();
  for (std::size_t c = 0; c < ext.size(); ++c) {
    if (ext[c].left == Extension::Left::Affine && ext[c].tag != bound[c].tag)
      Reader::corrupt("unknown affine extension tag '" + ext[c].tag + "'");
    if (ext[c].left == Extension::Left::Affine) ext[c].affine_offset = bound[c].affine_offset;
  }
  return j;
}

diatomic::PeriodicRipple periodic_from_text(const std::string& text) {
  Reader r(text);
  expect_kind(r, ObjectKind::Periodic);
  diatomic::PeriodicRipple p;
  p.scalars.sigma = r.scalar("sigma");
  p.scalars.mu = r.scalar("mu");
  p.scalars.beta = r.scalar("beta_P");
  p.scalars.omega = r.scalar("omega_P");
  p.alpha = r.scalar("alpha_P");
  p.orientation = r.scalar("orientation");
  p.orientation_flip = r.integer("orientation_flip") != 0;
  p.report = read_report(r);
  p.p = r.solution();
  r.end();
  if (p.p.components() != 4) Reader::corrupt("periodic ripple needs four components");
  return p;
}

diatomic::DiatomicWave diatomic_from_text(const std::string& text) {
  Reader r(text);
  expect_kind(r, ObjectKind::Diatomic);
  diatomic::DiatomicWave d;
  d.kappa = r.scalar("kappa");
  try {
    d.fixed = diatomic::parse_fixed(r.word("fixed"));
    d.scalars.sigma = r.scalar("sigma");
    d.scalars.mu = r.scalar("mu");
    d.scalars.beta = r.scalar("beta_P");
    d.scalars.omega = r.scalar("omega_P");
    d.alpha = r.scalar("alpha_P");
    d.cls = diatomic::parse_class(r.word("class"));
  } catch (const ContractViolation& e) {
    Reader::corrupt(e.what());
  }
  d.orientation_flip = r.integer("orientation_flip") != 0;
  d.report = read_report(r);
  d.system = r.solution();
  r.end();
  if (d.system.components() != 8 || d.system.params().size() != 3)
    Reader::corrupt("diatomic wave needs eight components and three parameters");
  return d;
}

ObjectKind peek_kind(const std::string& text) {
  Reader r(text);
  return r.header();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(Kind::Io, "cannot write " + tmp);
    out << content;
    if (!out) throw CheckpointError(Kind::Io, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError(Kind::Io, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace fputw::io
