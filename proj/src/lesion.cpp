#include "promptseg/lesion.hpp"

#include <algorithm>
#include <cctype>

#include "promptseg/error.hpp"

namespace promptseg {

std::string_view to_string(LesionClass c) noexcept {
    switch (c) {
        case LesionClass::MEL: return "MEL";
        case LesionClass::NV: return "NV";
        case LesionClass::BCC: return "BCC";
        case LesionClass::AKIEC: return "AKIEC";
        case LesionClass::BKL: return "BKL";
        case LesionClass::DF: return "DF";
        case LesionClass::VASC: return "VASC";
    }
    return "?";
}

LesionClass parse_lesion_class(std::string_view token) {
    std::string upper(token);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    for (LesionClass c : kCanonicalClassOrder) {
        if (upper == to_string(c)) return c;
    }
    throw ParseError("unknown lesion class '" + std::string(token) + "'");
}

}  // namespace promptseg
