#include "dronesim/version.hpp"

#ifndef DRONESIM_VERSION
#define DRONESIM_VERSION "0.1.0"
#endif

namespace dronesim {

std::string_view version() { return DRONESIM_VERSION; }

}  // namespace dronesim
