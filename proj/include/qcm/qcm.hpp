// Convenience include for the whole library.
#pragma once

#include "qcm/arith.hpp"
#include "qcm/density_matrix.hpp"
#include "qcm/errors.hpp"
#include "qcm/estimate.hpp"
#include "qcm/expr.hpp"
#include "qcm/gates.hpp"
#include "qcm/matrix.hpp"
#include "qcm/selftest.hpp"
#include "qcm/store.hpp"
