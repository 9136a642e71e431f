#pragma once

#include "glv/constants.hpp"

inline glv::BoundConstants cst_default() { return glv::BoundConstants{}; }
