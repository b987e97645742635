#pragma once

// Sparse precision-matrix estimation from (possibly indefinite) covariance
// surrogates, with side constraints keeping the problem well posed.

#include "precmat/admm.hpp"
#include "precmat/cov_inputs.hpp"
#include "precmat/csv.hpp"
#include "precmat/dataset_io.hpp"
#include "precmat/errors.hpp"
#include "precmat/estimators.hpp"
#include "precmat/evaluation.hpp"
#include "precmat/graph_export.hpp"
#include "precmat/harness.hpp"
#include "precmat/logdet_prox.hpp"
#include "precmat/penalty.hpp"
#include "precmat/projections.hpp"
#include "precmat/rng.hpp"
#include "precmat/sim_models.hpp"
#include "precmat/symmetric_matrix.hpp"
#include "precmat/tolerances.hpp"
#include "precmat/tuning.hpp"
#include "precmat/version.hpp"
