# -*- coding: utf-8 -*-
# Filename: run_data.py

"""
Tabular run data: training history, spike rates, timing histograms.
Created on 2026-09-12
"""

import os
import numpy as np

class RunData(object):
    '''
    A named table with one row per record.
    '''
    def __init__(self, name, description, legend, units=None, plottable=True, logy=False, grid='on'):
        '''
        Args:
            name: string name of the data, also the CSV file name.
            description: string description of the data.
            legend: column names.
            units: a tuple or list of strings, one per column. '' for unitless columns.
            plottable: False for tables that make no sense as curves.
            logy: plot with log scaling on the y axis.
            grid: if this is not 'off', it will be changed to 'on'.
        '''
        self.name = name
        self.description = description
        self.legend = list(legend)
        if units is None:
            self.units = [''] * len(self.legend)
        else:
            self.units = list(units)
            if len(self.units) != len(self.legend):
                raise ValueError('%s units for %s columns.' % (len(self.units), len(self.legend)))
        self.plottable = plottable
        self.logy = logy
        self.grid = 'on'
        if grid.lower() == 'off':
            self.grid = grid
        self.rows = []

    def __len__(self):
        return len(self.rows)

    def add_data(self, data):
        '''
        Append one row (a sequence with one value per column) or several rows
        (a 2-D array or a list of sequences).
        '''
        if len(data) == 0:
            return
        if np.ndim(data[0]) == 0:
            data = [data]
        for row in data:
            if len(row) != len(self.legend):
                raise ValueError('row of %s values for %s columns.' % (len(row), len(self.legend)))
            self.rows.append(tuple(row))

    def column(self, name):
        '''
        One column as a numpy array.
        '''
        i = self.legend.index(name)
        return np.array([r[i] for r in self.rows])

    def to_array(self):
        '''
        All rows as a float (n, m) array; only valid for numeric tables.
        '''
        return np.array(self.rows, dtype=np.float64).reshape((len(self.rows), len(self.legend)))

    def header(self):
        cols = []
        for name, unit in zip(self.legend, self.units):
            cols.append(name + (' (' + unit + ')' if unit else ''))
        return ','.join(cols)

    def save_to_file(self, data_dir):
        '''
        Save the rows to data_dir/<name>.csv with a header line.
        Returns:
            file name.
        '''
        file_name = os.path.join(data_dir, self.name + '.csv')
        table = np.empty((len(self.rows), len(self.legend)), dtype=object)
        for i, row in enumerate(self.rows):
            table[i, :] = row
        np.savetxt(file_name, table, fmt='%s', header=self.header(), delimiter=',', comments='')
        return file_name

    @classmethod
    def from_file(cls, file_name, description=''):
        '''
        Read a CSV written by save_to_file.
        '''
        with open(file_name, 'r') as f:
            header = f.readline().strip().split(',')
        legend = [h.split(' (')[0] for h in header]
        units = [h[h.index(' (') + 2:-1] if ' (' in h else '' for h in header]
        name = os.path.splitext(os.path.basename(file_name))[0]
        data = cls(name, description, legend, units)
        table = np.genfromtxt(file_name, delimiter=',', skip_header=1, dtype=None,
                              encoding='utf-8')
        if table.size == 0:
            return data
        if table.dtype.names is not None:
            data.add_data([tuple(r) for r in np.atleast_1d(table)])
        else:
            data.add_data(np.atleast_2d(table).reshape((-1, len(legend))))
        return data

    def plot(self, x_column, columns=None):
        '''
        Plot columns against x_column.
        '''
        from . import run_data_plot
        if self.plottable:
            run_data_plot.plot(self, x_column, columns)

def show_plot():
    '''
    Show all plots
    '''
    from . import run_data_plot
    run_data_plot.show_plot()
