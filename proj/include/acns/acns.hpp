#pragma once

#include "acns/params.hpp"
#include "acns/field.hpp"
#include "acns/operators.hpp"
#include "acns/linsolve.hpp"
#include "acns/stepper.hpp"
#include "acns/diagnostics.hpp"
#include "acns/mms.hpp"
#include "acns/verify.hpp"
#include "acns/config.hpp"
#include "acns/snapshot.hpp"
#include "acns/run.hpp"
