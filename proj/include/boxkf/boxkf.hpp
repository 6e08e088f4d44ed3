#pragma once

#include "boxkf/association.hpp"
#include "boxkf/detection.hpp"
#include "boxkf/error.hpp"
#include "boxkf/kalman_filter.hpp"
#include "boxkf/mot_io.hpp"
#include "boxkf/motion_model.hpp"
#include "boxkf/random.hpp"
#include "boxkf/simulation.hpp"
#include "boxkf/state.hpp"
#include "boxkf/stats.hpp"
#include "boxkf/tracker.hpp"
