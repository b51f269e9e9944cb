#pragma once

// Lowest-order H(div) virtual element solver for the 2D acoustic vibration
// eigenproblem, with a residual a posteriori estimator and adaptive
// barycenter-midpoint refinement on general polygonal meshes.

#include "avem/adapt.hpp"
#include "avem/assemble.hpp"
#include "avem/dof.hpp"
#include "avem/domain.hpp"
#include "avem/eig.hpp"
#include "avem/errors.hpp"
#include "avem/estimator.hpp"
#include "avem/generate.hpp"
#include "avem/geometry.hpp"
#include "avem/io.hpp"
#include "avem/local_ops.hpp"
#include "avem/mesh.hpp"
#include "avem/mixed.hpp"
