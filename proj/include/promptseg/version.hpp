#pragma once

#include <string>

namespace promptseg {

// "promptseg <version>", embedded in every output file's metadata.
inline std::string build_id() { return std::string("promptseg ") + PROMPTSEG_VERSION; }

}  // namespace promptseg
