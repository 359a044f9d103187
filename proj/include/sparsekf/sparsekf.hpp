#pragma once

#include "sparsekf/core/linalg.hpp"
#include "sparsekf/core/pattern.hpp"
#include "sparsekf/core/sparse.hpp"
#include "sparsekf/filters/dense_ukf.hpp"
#include "sparsekf/filters/enkf.hpp"
#include "sparsekf/filters/progressive_ekf.hpp"
#include "sparsekf/filters/sparse_ukf.hpp"
#include "sparsekf/filters/state.hpp"
#include "sparsekf/harness/config.hpp"
#include "sparsekf/harness/experiment.hpp"
#include "sparsekf/harness/report.hpp"
#include "sparsekf/harness/statistics.hpp"
#include "sparsekf/models/component_model.hpp"
#include "sparsekf/models/linear_model.hpp"
#include "sparsekf/models/lorenz96.hpp"
#include "sparsekf/models/observation.hpp"
