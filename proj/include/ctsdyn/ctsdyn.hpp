#pragma once

#include "ctsdyn/assembly.hpp"
#include "ctsdyn/control.hpp"
#include "ctsdyn/dynamics.hpp"
#include "ctsdyn/forces.hpp"
#include "ctsdyn/io.hpp"
#include "ctsdyn/linear.hpp"
#include "ctsdyn/materials.hpp"
#include "ctsdyn/model.hpp"
#include "ctsdyn/scenarios.hpp"
#include "ctsdyn/schedule.hpp"
#include "ctsdyn/statics.hpp"
#include "ctsdyn/svg.hpp"
#include "ctsdyn/types.hpp"
