#pragma once

#include "lodwave/assembly.hpp"
#include "lodwave/interp.hpp"
#include "lodwave/leapfrog.hpp"
#include "lodwave/linsolve.hpp"
#include "lodwave/mesh.hpp"
#include "lodwave/problems.hpp"
#include "lodwave/reduced.hpp"
#include "lodwave/sparse.hpp"
#include "lodwave/study.hpp"
