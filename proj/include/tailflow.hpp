#pragma once

#include "tailflow/rational.hpp"
#include "tailflow/weight.hpp"
#include "tailflow/word.hpp"
#include "tailflow/sequence.hpp"
#include "tailflow/cocycle.hpp"
#include "tailflow/kms.hpp"
#include "tailflow/measure.hpp"
#include "tailflow/subshift_measure.hpp"
#include "tailflow/classify.hpp"
#include "tailflow/markov.hpp"
#include "tailflow/json_io.hpp"
