#ifndef GEOWALK_GEOWALK_HPP
#define GEOWALK_GEOWALK_HPP

#include "geowalk/config.hpp"
#include "geowalk/errors.hpp"
#include "geowalk/geometry.hpp"
#include "geowalk/io.hpp"
#include "geowalk/numdiff.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/regularity.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/singularity.hpp"
#include "geowalk/spectral.hpp"
#include "geowalk/sunada.hpp"
#include "geowalk/walk.hpp"

#endif  // GEOWALK_GEOWALK_HPP
