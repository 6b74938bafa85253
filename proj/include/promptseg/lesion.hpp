#pragma once

#include <array>
#include <string>
#include <string_view>

namespace promptseg {

// Diagnostic category attached to each HAM10000 image (`dx` column).
enum class LesionClass { MEL, NV, BCC, AKIEC, BKL, DF, VASC };

inline constexpr std::size_t kLesionClassCount = 7;

// Canonical order used for files.
inline constexpr std::array<LesionClass, kLesionClassCount> kCanonicalClassOrder = {
    LesionClass::MEL, LesionClass::NV,  LesionClass::BCC, LesionClass::AKIEC,
    LesionClass::BKL, LesionClass::DF,  LesionClass::VASC};

// Row order of the reference per-lesion results table.
inline constexpr std::array<LesionClass, kLesionClassCount> kTableClassOrder = {
    LesionClass::MEL, LesionClass::VASC, LesionClass::NV,   LesionClass::BKL,
    LesionClass::BCC, LesionClass::AKIEC, LesionClass::DF};

// Upper-case token, e.g. "AKIEC".
std::string_view to_string(LesionClass c) noexcept;

// Case-insensitive; throws ParseError on anything else.
LesionClass parse_lesion_class(std::string_view token);

}  // namespace promptseg
