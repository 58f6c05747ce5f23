// SPDX-License-Identifier: Apache-2.0

#ifndef CMACWT_CMACWT_HPP
#define CMACWT_CMACWT_HPP

#include "cmacwt/baselines.hpp"
#include "cmacwt/barrier.hpp"
#include "cmacwt/channel.hpp"
#include "cmacwt/config.hpp"
#include "cmacwt/constellation.hpp"
#include "cmacwt/lift.hpp"
#include "cmacwt/linalg.hpp"
#include "cmacwt/mutual_info.hpp"
#include "cmacwt/optimizer.hpp"
#include "cmacwt/rng.hpp"
#include "cmacwt/scenario.hpp"
#include "cmacwt/subsolver.hpp"
#include "cmacwt/validate.hpp"

#endif  // CMACWT_CMACWT_HPP
