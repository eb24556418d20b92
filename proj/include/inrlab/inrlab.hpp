#ifndef INRLAB_INRLAB_HPP
#define INRLAB_INRLAB_HPP

// Convenience umbrella for the whole library.

#include "inrlab/bessel.hpp"
#include "inrlab/csv.hpp"
#include "inrlab/datagen.hpp"
#include "inrlab/dataset.hpp"
#include "inrlab/dual.hpp"
#include "inrlab/eig.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/experiments.hpp"
#include "inrlab/fft.hpp"
#include "inrlab/harmonics.hpp"
#include "inrlab/mapping.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/meta.hpp"
#include "inrlab/model.hpp"
#include "inrlab/model_io.hpp"
#include "inrlab/ntk.hpp"
#include "inrlab/pgm.hpp"
#include "inrlab/rng.hpp"
#include "inrlab/trainer.hpp"

#endif
