#pragma once

#include "shtrack/basis.hpp"
#include "shtrack/coefficients.hpp"
#include "shtrack/direction.hpp"
#include "shtrack/frame.hpp"
#include "shtrack/frame_io.hpp"
#include "shtrack/legendre.hpp"
#include "shtrack/mesh.hpp"
#include "shtrack/quadrature.hpp"
#include "shtrack/rotation.hpp"
#include "shtrack/scenario.hpp"
#include "shtrack/shape.hpp"
#include "shtrack/tracker.hpp"
#include "shtrack/ukf.hpp"
#include "shtrack/voxel.hpp"
