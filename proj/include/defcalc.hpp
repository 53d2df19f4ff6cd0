#pragma once

#include "defcalc/scalar.hpp"
#include "defcalc/linalg.hpp"
#include "defcalc/algebra.hpp"
#include "defcalc/deformation.hpp"
#include "defcalc/presentations.hpp"
#include "defcalc/structure.hpp"
#include "defcalc/quantum.hpp"
#include "defcalc/bounds.hpp"
