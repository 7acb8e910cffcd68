/** Row-major float64 matrices and the handful of ops the encoder needs. */

export interface Mat {
  rows: number;
  cols: number;
  data: Float64Array;
}

export function zeros(rows: number, cols: number): Mat {
  return { rows, cols, data: new Float64Array(rows * cols) };
}

export function matmul(a: Mat, b: Mat): Mat {
  if (a.cols !== b.rows) {
    throw new Error(`matmul shape mismatch: ${a.rows}x${a.cols} @ ${b.rows}x${b.cols}`);
  }
  const out = zeros(a.rows, b.cols);
  const { data: ad } = a;
  const { data: bd } = b;
  const od = out.data;
  for (let i = 0; i < a.rows; i++) {
    const arow = i * a.cols;
    const orow = i * b.cols;
    for (let k = 0; k < a.cols; k++) {
      const av = ad[arow + k];
      if (av === 0) continue;
      const brow = k * b.cols;
      for (let j = 0; j < b.cols; j++) {
        od[orow + j] += av * bd[brow + j];
      }
    }
  }
  return out;
}

export function addBiasInPlace(m: Mat, bias: Float64Array): Mat {
  for (let i = 0; i < m.rows; i++) {
    const row = i * m.cols;
    for (let j = 0; j < m.cols; j++) m.data[row + j] += bias[j];
  }
  return m;
}

export function addInPlace(a: Mat, b: Mat): Mat {
  for (let i = 0; i < a.data.length; i++) a.data[i] += b.data[i];
  return a;
}

export function layerNormInPlace(m: Mat, gamma: Float64Array,
                                 beta: Float64Array, eps = 1e-12): Mat {
  for (let i = 0; i < m.rows; i++) {
    const row = i * m.cols;
    let mean = 0;
    for (let j = 0; j < m.cols; j++) mean += m.data[row + j];
    mean /= m.cols;
    let variance = 0;
    for (let j = 0; j < m.cols; j++) {
      const d = m.data[row + j] - mean;
      variance += d * d;
    }
    variance /= m.cols;
    const inv = 1.0 / Math.sqrt(variance + eps);
    for (let j = 0; j < m.cols; j++) {
      m.data[row + j] = (m.data[row + j] - mean) * inv * gamma[j] + beta[j];
    }
  }
  return m;
}

/** tanh approximation of GELU, as used by BERT-family encoders. */
export function geluInPlace(m: Mat): Mat {
  const c = Math.sqrt(2.0 / Math.PI);
  for (let i = 0; i < m.data.length; i++) {
    const x = m.data[i];
    m.data[i] = 0.5 * x * (1.0 + Math.tanh(c * (x + 0.044715 * x * x * x)));
  }
  return m;
}

export function softmaxRowsInPlace(m: Mat): Mat {
  for (let i = 0; i < m.rows; i++) {
    const row = i * m.cols;
    let max = -Infinity;
    for (let j = 0; j < m.cols; j++) max = Math.max(max, m.data[row + j]);
    let sum = 0;
    for (let j = 0; j < m.cols; j++) {
      const e = Math.exp(m.data[row + j] - max);
      m.data[row + j] = e;
      sum += e;
    }
    for (let j = 0; j < m.cols; j++) m.data[row + j] /= sum;
  }
  return m;
}

export function sliceCols(m: Mat, start: number, width: number): Mat {
  const out = zeros(m.rows, width);
  for (let i = 0; i < m.rows; i++) {
    for (let j = 0; j < width; j++) {
      out.data[i * width + j] = m.data[i * m.cols + start + j];
    }
  }
  return out;
}

export function transpose(m: Mat): Mat {
  const out = zeros(m.cols, m.rows);
  for (let i = 0; i < m.rows; i++) {
    for (let j = 0; j < m.cols; j++) {
      out.data[j * m.rows + i] = m.data[i * m.cols + j];
    }
  }
  return out;
}
