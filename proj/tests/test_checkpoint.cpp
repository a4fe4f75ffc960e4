#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fputw/checkpoint.hpp"
#include "fputw/errors.hpp"

using namespace fputw;
using namespace fputw::io;

namespace {

monatomic::SolverOptions mono_opts() {
  monatomic::SolverOptions o;
  o.intervals = 64;
  return o;
}

diatomic::Options dia_opts() {
  diatomic::Options o;
  o.intervals = 64;
  return o;
}

const monatomic::MonatomicWave& mono() {
  static const auto w = monatomic::solve_profile(1.0, mono_opts());
  return w;
}

CheckpointError::Kind failure_kind(const std::string& text) {
  try {
    diatomic_from_text(text);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  FAIL("expected a CheckpointError");
  return CheckpointError::Kind::Io;
}

template <class T, class Load>
void check_roundtrip(const T& object, Load load, ObjectKind kind) {
  const std::string first = to_text(object);
  CHECK(peek_kind(first) == kind);
  CHECK(to_text(load(first)) == first);
}

}  // namespace

TEST_SUITE("checkpoint") {
  TEST_CASE("write, read, write is byte identical for every kind") {
    Mesh mesh = build_mesh(3.0, 8, 3);
    auto sol = PiecewiseSolution::interpolate(mesh, 2, {Extension::odd_zero(), Extension::even_zero()},
                                              [](int c, double t) { return c ? std::cos(t) / 3.0 : std::sin(t); });
    check_roundtrip(sol, solution_from_text, ObjectKind::Solution);
    check_roundtrip(mono(), monatomic_from_text, ObjectKind::Monatomic);
    check_roundtrip(monatomic::solve_jost(mono(), mono_opts()), jost_from_text, ObjectKind::Jost);
    check_roundtrip(diatomic::solve_periodic(1.2, -0.3, 0.01, dia_opts()), periodic_from_text, ObjectKind::Periodic);
    auto wave = diatomic::solve_wave(1.0, diatomic::FixedParam::Mu, 0.0, diatomic::seed_from_monatomic(mono(), dia_opts()),
                                     dia_opts());
    check_roundtrip(wave, diatomic_from_text, ObjectKind::Diatomic);
  }

  TEST_CASE("loaded objects evaluate like the originals") {
    auto back = monatomic_from_text(to_text(mono()));
    CHECK(back.sigma == mono().sigma);
    for (double t : {0.0, 0.3, 2.0, 7.5, -1.0, 40.0}) CHECK(back.phi.value(0, t) == mono().phi.value(0, t));
  }

  TEST_CASE("file round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "fputw_ckpt_test.txt").string();
    save(path, mono());
    CHECK(read_file(path) == to_text(mono()));
    std::filesystem::remove(path);
    try {
      read_file(path);
      FAIL("expected a CheckpointError");
    } catch (const CheckpointError& e) {
      CHECK(e.kind() == CheckpointError::Kind::Io);
    }
  }

  TEST_CASE("damaged checkpoints are rejected") {
    auto wave = diatomic::solve_wave(1.0, diatomic::FixedParam::Mu, 0.0, diatomic::seed_from_monatomic(mono(), dia_opts()),
                                     dia_opts());
    const std::string text = to_text(wave);
    for (double frac : {0.0, 0.1, 0.5, 0.99})
      CHECK(failure_kind(text.substr(0, static_cast<std::size_t>(frac * text.size()))) ==
            CheckpointError::Kind::Corrupt);

    std::string bumped = text;
    const auto pos = bumped.find(' ');
    bumped.replace(pos + 1, 1, std::to_string(kCheckpointVersion + 1));
    CHECK(failure_kind(bumped) == CheckpointError::Kind::VersionMismatch);
    CHECK_THROWS_AS(peek_kind(bumped), CheckpointError);

    // a valid checkpoint of another kind is not silently accepted
    CHECK(failure_kind(to_text(mono())) == CheckpointError::Kind::Corrupt);
  }
}
