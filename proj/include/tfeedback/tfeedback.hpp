#pragma once

// Umbrella header.

#include "tfeedback/core.hpp"
#include "tfeedback/rankings.hpp"
#include "tfeedback/scoring_vector.hpp"
#include "tfeedback/feedback.hpp"
#include "tfeedback/rules.hpp"
#include "tfeedback/constructions.hpp"
#include "tfeedback/experiments.hpp"
#include "tfeedback/io.hpp"
#include "tfeedback/verify.hpp"
