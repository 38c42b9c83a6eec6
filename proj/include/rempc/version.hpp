#pragma once

namespace rempc {

/// Toolkit version embedded in every output file.
const char* version();

}  // namespace rempc
