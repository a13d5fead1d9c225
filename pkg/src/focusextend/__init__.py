"""focusextend: extend the in-focus region of defocus-blurred images.

A numpy/scipy library for space-variant deblurring of single 2D images: a
per-patch no-reference blur level drives the choice of a point-spread
function (parametric Gaussian or a lookup table of estimated kernels), every
patch is Wiener-restored, and results are stitched seamlessly. Ships with
the synthetic forward model, ground-truth kernel estimation and focal-stack
fusion needed to build and validate the lookup table without clinical data.
"""

from .blur import blur_map, crete_blur
from .config import Config, load_config_file
from .errors import (ConfigError, CoverageError, DegenerateInputError,
                     DimensionError, EmptyTableError, FocusExtendError,
                     RegistrationError)
from .estimate import (KernelMap, estimate_kernel, estimate_kernel_map,
                       kernel_montage, load_kernel_map, save_kernel_map)
from .forward import (add_noise, cell_texture, constant_profile, convolve,
                      ramp_profile, synth_depth_blur)
from .image_io import as_image, green_channel, load_image, save_image
from .patches import (PatchGrid, blend_window, extract_patches, splat_values,
                      stitch_patches)
from .psf import (KernelLUT, delta_kernel, gaussian_kernel,
                  kernel_second_moment, load_lut, lut_build, lut_query,
                  normalize_kernel, save_lut, sigma_from_blur)
from .restore import deblur_image, inverse_filter, mse, psnr, psf2otf, wiener
from .stack import fuse_stack, register_translation, shift_image

__version__ = "0.1.0"

__all__ = [
    "Config", "CoverageError", "ConfigError", "DegenerateInputError",
    "DimensionError", "EmptyTableError", "FocusExtendError", "KernelLUT",
    "KernelMap", "PatchGrid", "RegistrationError", "add_noise", "as_image",
    "blend_window", "blur_map", "cell_texture", "constant_profile",
    "convolve", "crete_blur", "deblur_image", "delta_kernel",
    "estimate_kernel", "estimate_kernel_map", "extract_patches", "fuse_stack",
    "gaussian_kernel", "green_channel", "inverse_filter",
    "kernel_montage", "kernel_second_moment", "load_config_file",
    "load_image", "load_kernel_map", "load_lut", "lut_build", "lut_query",
    "mse", "normalize_kernel", "psf2otf", "psnr", "ramp_profile",
    "register_translation", "save_image", "save_kernel_map", "save_lut",
    "shift_image", "sigma_from_blur", "splat_values", "stitch_patches",
    "synth_depth_blur", "wiener",
]
