#pragma once

#include "elastinv/derivative.hpp"
#include "elastinv/errors.hpp"
#include "elastinv/forward.hpp"
#include "elastinv/geometry.hpp"
#include "elastinv/inverse.hpp"
#include "elastinv/io.hpp"
#include "elastinv/modal.hpp"
#include "elastinv/specfun.hpp"
