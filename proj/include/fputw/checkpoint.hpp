#pragma once

#include <string>

#include "fputw/diatomic.hpp"
#include "fputw/errors.hpp"
#include "fputw/monatomic.hpp"
#include "fputw/piecewise.hpp"

namespace fputw::io {

inline constexpr int kCheckpointVersion = 1;

enum class ObjectKind { Solution, Monatomic, Jost, Periodic, Diatomic };

std::string to_string(ObjectKind k);

// Text checkpoints: a "fputw-checkpoint <version>" header, a kind line, the
// object's scalars and the collocation data, closed by "end". Doubles are
// written with 17 significant digits, so write -> read -> write is exact.
// Affine extensions only keep their tag; loaders rebind the known ones.

std::string to_text(const PiecewiseSolution& s);
std::string to_text(const monatomic::MonatomicWave& w);
std::string to_text(const monatomic::JostSolution& j);
std::string to_text(const diatomic::PeriodicRipple& r);
std::string to_text(const diatomic::DiatomicWave& w);

PiecewiseSolution solution_from_text(const std::string& text);
monatomic::MonatomicWave monatomic_from_text(const std::string& text);
monatomic::JostSolution jost_from_text(const std::string& text);
diatomic::PeriodicRipple periodic_from_text(const std::string& text);
diatomic::DiatomicWave diatomic_from_text(const std::string& text);

/// Kind recorded in a checkpoint header (validates the version).
ObjectKind peek_kind(const std::string& text);

std::string read_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::string& path, const std::string& content);

template <class T>
void save(const std::string& path, const T& object) {
  write_file(path, to_text(object));
}

}  // namespace fputw::io
