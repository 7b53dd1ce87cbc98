#pragma once

#include "speared/code_store.hpp"
#include "speared/collision.hpp"
#include "speared/dsl.hpp"
#include "speared/envelope.hpp"
#include "speared/error.hpp"
#include "speared/kinematics.hpp"
#include "speared/number_format.hpp"
#include "speared/pose.hpp"
#include "speared/report.hpp"
#include "speared/scene.hpp"
#include "speared/serialization.hpp"
#include "speared/service.hpp"
#include "speared/sim.hpp"
#include "speared/vendor.hpp"
