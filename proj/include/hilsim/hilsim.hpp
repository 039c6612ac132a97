#pragma once

#include "hilsim/analysis.hpp"
#include "hilsim/contact.hpp"
#include "hilsim/core.hpp"
#include "hilsim/delay_line.hpp"
#include "hilsim/dynamics.hpp"
#include "hilsim/io.hpp"
#include "hilsim/linear.hpp"
#include "hilsim/scenario.hpp"
#include "hilsim/stability.hpp"
