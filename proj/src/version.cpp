#include "rempc/version.hpp"

#ifndef REMPC_VERSION
#define REMPC_VERSION "0.0.0"
#endif

namespace rempc {

const char* version() { return REMPC_VERSION; }

}  // namespace rempc
