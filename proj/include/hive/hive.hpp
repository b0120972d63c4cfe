#pragma once

// Umbrella header for the beehive-state recognition library.

#include "hive/audio.hpp"
#include "hive/cache.hpp"
#include "hive/cnn.hpp"
#include "hive/emd.hpp"
#include "hive/errors.hpp"
#include "hive/eval.hpp"
#include "hive/experiment.hpp"
#include "hive/features.hpp"
#include "hive/fft.hpp"
#include "hive/hht.hpp"
#include "hive/manifest.hpp"
#include "hive/matrix.hpp"
#include "hive/parallel.hpp"
#include "hive/pitch.hpp"
#include "hive/spectral.hpp"
#include "hive/svm.hpp"
#include "hive/synth.hpp"
#include "hive/zscore.hpp"
