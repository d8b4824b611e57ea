# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.

"""Unisum, desk-scale verification of universal quadratic sums over Z"""

__version__ = "0.1.0-alpha"
