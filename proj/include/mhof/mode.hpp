#pragma once

#include <stdexcept>
#include <string>

namespace mhof {

// Generation mode: single-human (body-only model, longer subsequences)
// or multi-human (finger articulation, shorter subsequences).
enum class Mode { shof, mhof };

inline std::string to_string(Mode m) { return m == Mode::shof ? "shof" : "mhof"; }

inline Mode mode_from_string(const std::string& s) {
    if (s == "shof") return Mode::shof;
    if (s == "mhof") return Mode::mhof;
    throw std::invalid_argument("unknown mode: " + s);
}

}  // namespace mhof
